// Runs every acceptance criterion and prints one verdict line per criterion.
//
// Exit status is 0 when the set of failing criteria equals the --known-red
// list exactly, so a documented red stays visible in the output while an
// unexpected failure (or an unexpected pass of a known red) breaks the run.
#include <cstdio>
#include <set>
#include <sstream>

#include <CLI11.hpp>

#include "dipole/suite.hpp"

using namespace dipole;

int main(int argc, char** argv) {
  CLI::App app{"acceptance criteria"};
  std::string level = "full", known = "";
  std::uint64_t seed = 7;
  app.add_option("--level", level)->check(CLI::IsMember({"quick", "full"}));
  app.add_option("--seed", seed);
  app.add_option("--known-red", known, "comma-separated criterion ids expected to fail");
  CLI11_PARSE(app, argc, argv);

  std::set<int> expected_red;
  std::stringstream ss(known);
  for (std::string item; std::getline(ss, item, ',');)
    if (!item.empty()) expected_red.insert(std::stoi(item));

  SuiteOptions opts;
  opts.full = level == "full";
  opts.seed = seed;
  const SuiteRun run = run_suite(opts);

  std::set<int> red;
  for (const auto& r : run.results) {
    std::printf("criterion %2d  %s  %s: %s%s\n", r.id, r.pass ? "PASS" : "FAIL", r.title.c_str(), r.summary.c_str(),
                !r.pass && expected_red.count(r.id) ? "  [known red, see README]" : "");
    if (!r.pass) red.insert(r.id);
  }
  const bool as_documented = red == expected_red;
  std::printf("%zu of %zu criteria pass; failing set %s the documented set\n", run.results.size() - red.size(),
              run.results.size(), as_documented ? "matches" : "DIFFERS FROM");
  std::fflush(stdout);
  return as_documented ? 0 : 1;
}
