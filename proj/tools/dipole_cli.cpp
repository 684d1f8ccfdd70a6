#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "dipole/suite.hpp"

using namespace dipole;

namespace {

struct Global {
  std::string config;
  std::string output;
  std::string model_path;
  std::uint64_t seed = 7;
  double abs_tol = -1, rel_tol = -1, truncation_radius = -1;
  bool emit_table = false;
  bool timings = false;
};

std::vector<double> parse_csv(const std::string& s, const char* what) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    try {
      size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ParseError(std::string("cannot read ") + what + " entry '" + item + "'");
    }
  }
  return out;
}

std::vector<Channel> parse_channels(const std::string& s) {
  std::vector<Channel> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_channel(item));
  return out;
}

// "x,y;x,y;..."
std::vector<std::vector<double>> parse_points(const std::string& s) {
  std::vector<std::vector<double>> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ';'))
    if (!item.empty()) out.push_back(parse_csv(item, "point"));
  return out;
}

struct Context {
  Global g;
  QuadSpec spec;
  Json config = Json::object();
  std::optional<MomentModel> model;

  void resolve() {
    std::string path = g.config;
    if (path.empty())
      if (const char* env = std::getenv("DIPOLE_CONFIG")) path = env;
    if (!path.empty()) {
      config = load_json_file(path);
      if (!config.is_object()) throw ParseError(path + ":1:1: config must be a flat JSON object");
      spec = quad_spec_from_json(config, spec);
      if (g.model_path.empty() && config.contains("model")) g.model_path = config["model"].get<std::string>();
      if (g.output.empty() && config.contains("output")) g.output = config["output"].get<std::string>();
    }
    if (g.abs_tol > 0) spec.abs_tol = g.abs_tol;
    if (g.rel_tol > 0) spec.rel_tol = g.rel_tol;
    if (g.truncation_radius > 0) spec.truncation_radius = g.truncation_radius;
    spec.validate();
    if (!g.model_path.empty()) model = load_model_file(g.model_path);
  }

  MomentModel need_model() const {
    if (model) return *model;
    MomentModel m;
    m.cumulants[3] = 1.0;
    m.cumulants[4] = 1.0;
    return m;
  }

  Json provenance() const {
    Json j{{"quad_spec", to_json(spec)}, {"seed", g.seed}, {"rng", Lcg::kName}};
    if (model) j["model"] = to_json(*model);
    return j;
  }

  void emit(const Json& doc) const {
    const std::string text = dump(doc);
    if (g.output.empty()) {
      std::cout << text;
    } else {
      std::ofstream out(g.output, std::ios::binary);
      if (!out) throw ParseError(g.output + ": cannot open for writing");
      out << text;
    }
  }
};

std::vector<WavePacket> packets_or_seeded(const std::string& path, int count, std::uint64_t seed, int dim) {
  if (!path.empty()) return load_packets_file(path);
  Lcg rng(seed);
  std::vector<WavePacket> out;
  for (int i = 0; i < count; ++i) out.push_back(random_packet(rng, dim));
  return out;
}

void table(const std::vector<std::string>& head, const std::vector<std::vector<std::string>>& rows) {
  std::vector<size_t> w(head.size());
  for (size_t c = 0; c < head.size(); ++c) {
    w[c] = head[c].size();
    for (const auto& r : rows) w[c] = std::max(w[c], r[c].size());
  }
  auto line = [&](const std::vector<std::string>& r) {
    for (size_t c = 0; c < r.size(); ++c) std::printf("%s%-*s", c ? "  " : "", static_cast<int>(w[c]), r[c].c_str());
    std::printf("\n");
  };
  line(head);
  std::vector<std::string> rule;
  for (size_t c = 0; c < w.size(); ++c) rule.push_back(std::string(w[c], '-'));
  line(rule);
  for (const auto& r : rows) line(r);
}

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

std::string num(cplx z) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g%+.6gi", z.real(), z.imag());
  return buf;
}

}  // namespace

int main(int argc, char** argv) {
  Context ctx;
  CLI::App app{"Mass-shell distributions, dipole form factors and scattering checks"};
  app.require_subcommand(1);
  app.fallthrough();
  app.add_option("--config", ctx.g.config, "flat JSON config (default from $DIPOLE_CONFIG)");
  app.add_option("--output,-o", ctx.g.output, "write the JSON report here instead of stdout");
  app.add_option("--model", ctx.g.model_path, "model file (JSON)");
  app.add_option("--seed", ctx.g.seed, "seed for generated packet suites");
  app.add_option("--abs-tol", ctx.g.abs_tol, "quadrature absolute tolerance");
  app.add_option("--rel-tol", ctx.g.rel_tol, "quadrature relative tolerance");
  app.add_option("--truncation-radius", ctx.g.truncation_radius, "packet window in Gaussian widths");
  app.add_flag("--emit-table", ctx.g.emit_table, "print a plain-text table instead of JSON");
  app.add_flag("--timings", ctx.g.timings, "add wall-clock timings to the report");

  // smear
  std::string expr_path, packets_path;
  double split_eps = 0.5, pole_margin = 0.05, cons_sigma = 0.0;
  auto* smear_cmd = app.add_subcommand("smear", "smear a distribution expression against packets");
  smear_cmd->add_option("--expr", expr_path, "DistExpr JSON file")->required();
  smear_cmd->add_option("--packets", packets_path, "packets JSON file")->required();
  smear_cmd->add_option("--split-eps", split_eps, "PV/FP shell window in units of m^2");
  smear_cmd->add_option("--pole-margin", pole_margin, "minimum |k^2-m^2| of an eliminated pole variable / m^2");
  smear_cmd->add_option("--conservation-sigma", cons_sigma, "Gaussian width replacing the conservation delta");

  // lemmas
  std::string which = "A2";
  int n_packets = 20;
  auto* lemmas_cmd = app.add_subcommand("lemmas", "seeded shell-identity suites");
  lemmas_cmd->add_option("--which", which, "A1, A2, A3 or A4")->check(CLI::IsMember({"A1", "A2", "A3", "A4"}));
  lemmas_cmd->add_option("--packets", n_packets, "number of packets");

  // limit
  int power = 2;
  std::string channel = "out", t_grid = "5,10,20,40,80";
  double eps = -1;
  std::string packet_path;
  auto* limit_cmd = app.add_subcommand("limit", "large-t limit of chi^d_t / (k^2 - m^2)^p");
  limit_cmd->add_option("--power", power, "pole power")->check(CLI::IsMember({1, 2}));
  limit_cmd->add_option("--channel", channel, "in, loc or out");
  limit_cmd->add_option("--t-grid", t_grid, "comma-separated times");
  limit_cmd->add_option("--packet", packet_path, "packet JSON file (default: Gaussian at (1.2, 0.4))");
  limit_cmd->add_option("--eps", eps, "cutoff half-width (default m^2/2)");

  // wightman
  int n = 3;
  std::string channels, times, multiplier = "chi_d_t";
  bool with_form_factor = false, assemble = false;
  auto* wightman_cmd = app.add_subcommand("wightman", "truncated Wightman functions with channel multipliers");
  wightman_cmd->add_option("--n", n, "number of arguments");
  wightman_cmd->add_option("--packets", packets_path, "packets JSON file (default: seeded)");
  wightman_cmd->add_option("--channels", channels, "comma-separated in/loc/out (default all loc)");
  wightman_cmd->add_option("--times", times, "comma-separated times (default 0)");
  wightman_cmd->add_option("--multiplier", multiplier, "chi_t, chi_d_t or haag_ruelle");
  wightman_cmd->add_flag("--form-factor", with_form_factor, "also evaluate the form factor");
  wightman_cmd->add_flag("--assemble", assemble, "also assemble the full moment from truncated blocks");

  // schwinger
  std::string points;
  auto* schwinger_cmd = app.add_subcommand("schwinger", "truncated Schwinger functions");
  schwinger_cmd->add_option("--n", n, "number of points");
  schwinger_cmd->add_option("--points", points, "points as x,y;x,y;...")->required();

  // smatrix
  int r = 1;
  auto* smatrix_cmd = app.add_subcommand("smatrix", "truncated S-matrix: closed form vs limit path");
  smatrix_cmd->add_option("--n", n, "number of arguments");
  smatrix_cmd->add_option("--r", r, "number of incoming arguments");
  smatrix_cmd->add_option("--t-grid", t_grid, "comma-separated times for the limit path");
  smatrix_cmd->add_option("--packets", packets_path, "packets JSON file (positive energy)")->required();
  double sigma0 = 0.1;
  int levels = 4;
  smatrix_cmd->add_option("--sigma0", sigma0, "initial Gaussian width of the conservation delta");
  smatrix_cmd->add_option("--levels", levels, "number of halvings");

  // divergence
  auto* div_cmd = app.add_subcommand("divergence", "growth of the Wightman function under channel multipliers");
  div_cmd->add_option("--n", n, "number of arguments");
  div_cmd->add_option("--channels", channels, "comma-separated in/loc/out (default in,loc,...,out)");
  div_cmd->add_option("--t-grid", t_grid, "comma-separated times");
  div_cmd->add_option("--packets", packets_path, "packets JSON file")->required();
  div_cmd->add_option("--multiplier", multiplier, "chi_t, chi_d_t or haag_ruelle");

  // perturb
  std::string rho_arg = "sinh-gordon";
  int q = 0;
  double lambda = 1.0;
  bool trig = false;
  auto* perturb_cmd = app.add_subcommand("perturb", "first-order exponential model");
  perturb_cmd->add_option("--rho", rho_arg, "'sinh-gordon' or a coupling-measure JSON file");
  perturb_cmd->add_option("--q", q, "order of the Wightman/S-matrix term");
  perturb_cmd->add_option("--r", r, "number of incoming arguments");
  perturb_cmd->add_option("--points", points, "Euclidean points x,y;x,y;... for the Schwinger function");
  perturb_cmd->add_option("--lambda", lambda, "coupling");
  perturb_cmd->add_option("--packets", packets_path, "packets JSON file for the S-matrix term");
  perturb_cmd->add_option("--t-grid", t_grid, "comma-separated times for the limit path");
  perturb_cmd->add_flag("--trigonometric", trig, "alpha -> i alpha");

  // suite
  std::string level = "quick", only;
  auto* suite_cmd = app.add_subcommand("suite", "acceptance criteria");
  suite_cmd->add_option("--level", level, "quick or full")->check(CLI::IsMember({"quick", "full"}));
  suite_cmd->add_option("--only", only, "comma-separated criterion ids");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    if (code != 0) std::cerr << app.help();
    return code == 0 ? 0 : 2;
  }

  const auto t_start = std::chrono::steady_clock::now();
  try {
    ctx.resolve();
    Json doc{{"command", app.get_subcommands().front()->get_name()}, {"provenance", ctx.provenance()}};
    bool pass = true;

    if (smear_cmd->parsed()) {
      const DistExpr e = load_dist_file(expr_path);
      const auto packets = load_packets_file(packets_path);
      SmearOptions opts;
      opts.split_eps = split_eps;
      opts.pole_margin = pole_margin;
      opts.conservation_sigma = cons_sigma;
      const SmearValue v = smear(e, packets, ctx.spec, opts);
      doc["inputs"] = Json{{"expr", to_json(e)}, {"n_packets", packets.size()}};
      doc["result"] = to_json(v);
      pass = v.tolerance_met;
    } else if (lemmas_cmd->parsed()) {
      Json rep;
      if (which == "A1") rep = lemma_a1_suite(ctx.g.seed, n_packets, ctx.spec, &pass);
      else if (which == "A2") rep = lemma_a2_suite(ctx.g.seed, n_packets, ctx.spec, &pass);
      else {
        Json all = lemma_a3_a4_suite(ctx.g.seed, n_packets, ctx.spec, nullptr);
        Json keep = Json::array();
        for (const auto& x : all["reports"])
          if (x["lemma"] == which) {
            keep.push_back(x);
            pass = pass && x["pass"].get<bool>();
          }
        rep = Json{{"lemma", which}, {"t", all["t"]}, {"pass", pass}, {"reports", keep}};
      }
      doc["result"] = rep;
      if (ctx.g.emit_table) {
        std::vector<std::vector<std::string>> rows;
        if (which == "A1" || which == "A2") {
          for (const auto& c : rep["cases"]) {
            const double dev = which == "A1" ? c["abs_dev"].get<double>()
                                             : std::max(c["+"]["rel_dev"].get<double>(), c["-"]["rel_dev"].get<double>());
            rows.push_back({std::to_string(rows.size()), std::to_string(c["dim"].get<int>()), num(dev),
                            c["pass"].get<bool>() ? "pass" : "FAIL"});
          }
          table({"case", "dim", which == "A1" ? "abs dev" : "rel dev", "verdict"}, rows);
        } else {
          for (const auto& x : rep["reports"])
            rows.push_back({x["channel"].get<std::string>(), x["sign"].get<std::string>(),
                            num(x["max_rel_dev"].get<double>()), x["pass"].get<bool>() ? "pass" : "FAIL"});
          table({"channel", "sign", "max rel dev", "verdict"}, rows);
        }
      }
    } else if (limit_cmd->parsed()) {
      const WavePacket p = packet_path.empty() ? WavePacket::gaussian_diag({1.2, 0.4}, {0.4, 0.4})
                                               : load_packets_file(packet_path).front();
      TGrid grid;
      grid.values = parse_csv(t_grid, "t-grid");
      LimitOptions lo;
      lo.cutoff.eps = eps;
      const LimitReport rep = limit_and_compare(LimitTarget::make(power, parse_channel(channel), 1.0), grid, p, ctx.spec, lo);
      doc["inputs"] = Json{{"packet", to_json(p)}, {"eps", eps > 0 ? eps : 0.5}};
      doc["result"] = to_json(rep);
      pass = rep.pass;
      if (ctx.g.emit_table) {
        std::vector<std::vector<std::string>> rows;
        for (size_t i = 0; i < rep.t.size(); ++i)
          rows.push_back({num(rep.t[i]), num(rep.values[i]), num(rep.deviations[i]), num(rep.rel_deviations[i]),
                          i ? num(rep.decay_ratios[i - 1]) : std::string("-")});
        std::printf("target %s\n", num(rep.target).c_str());
        table({"t", "value", "deviation", "rel deviation", "ratio"}, rows);
      }
    } else if (wightman_cmd->parsed()) {
      const MomentModel model = ctx.need_model();
      const auto packets = packets_or_seeded(packets_path, n, ctx.g.seed, model.dim);
      ChannelAssignment assign;
      assign.channels = channels.empty() ? std::vector<Channel>(n, Channel::Loc) : parse_channels(channels);
      assign.times = times.empty() ? std::vector<double>(n, 0.0) : parse_csv(times, "times");
      const SmearValue v = finite_time_wightman(n, assign, model, packets, ctx.spec, parse_mult_kind(multiplier));
      doc["inputs"] = Json{{"n", n}, {"channels", channels}, {"times", assign.times}, {"multiplier", multiplier}};
      doc["result"] = Json{{"finite_time", to_json(v)}};
      if (with_form_factor) {
        const FormFactorReport ff = form_factor(n, assign, model, packets, ctx.spec);
        doc["result"]["form_factor"] = to_json(ff.value);
        if (ff.regularization) doc["result"]["regularization"] = to_json(*ff.regularization);
      }
      if (assemble) {
        const AssemblyReport ar = assemble_wightman_moments(n, model, packets, ctx.spec);
        doc["result"]["moment"] = Json{{"value", to_json(ar.value)},
                                       {"partitions", ar.partitions_total},
                                       {"contributing", ar.partitions_contributing}};
      }
      pass = v.tolerance_met;
    } else if (schwinger_cmd->parsed()) {
      const MomentModel model = ctx.need_model();
      const auto pts = parse_points(points);
      const SchwingerValue v = schwinger_truncated(n, pts, model, ctx.spec);
      doc["inputs"] = Json{{"n", n}, {"points", pts}};
      doc["result"] = Json{{"value", v.value}, {"err_est", v.err_est}, {"n_evals", v.n_evals}};
    } else if (smatrix_cmd->parsed()) {
      const MomentModel model = ctx.need_model();
      const auto packets = load_packets_file(packets_path);
      TGrid grid;
      grid.values = parse_csv(t_grid, "t-grid");
      RegSpec reg{sigma0, levels};
      const RegReport closed = smatrix_truncated(n, r, model, packets, ctx.spec, reg);
      const LimitPathReport path = smatrix_limit_path(n, r, model, packets, grid, ctx.spec);
      const double gap = std::abs(closed.value.value - path.limit.value);
      const bool agree = gap <= 5e-2 * std::max(std::abs(closed.value.value), std::abs(path.limit.value)) +
                                    closed.value.err_est + path.limit.err_est;
      doc["inputs"] = Json{{"n", n}, {"r", r}, {"t_grid", grid.values}, {"sigma0", sigma0}, {"levels", levels}};
      doc["result"] = Json{{"closed_form", to_json(closed)}, {"limit_path", to_json(path)}, {"agree", agree}};
      pass = agree && closed.converged;
    } else if (div_cmd->parsed()) {
      const MomentModel model = ctx.need_model();
      const auto packets = load_packets_file(packets_path);
      std::vector<Channel> ch;
      if (channels.empty()) {
        ch.assign(n, Channel::Loc);
        ch.front() = Channel::In;
        ch.back() = Channel::Out;
      } else {
        ch = parse_channels(channels);
      }
      TGrid grid;
      grid.values = parse_csv(t_grid, "t-grid");
      const MultKind kind = parse_mult_kind(multiplier);
      const DivergenceReport rep = divergence_demo(n, model, packets, ch, grid, kind, ctx.spec);
      doc["result"] = to_json(rep);
      pass = kind == MultKind::ChiDT ? rep.bounded : rep.growing;
      if (ctx.g.emit_table) {
        std::vector<std::vector<std::string>> rows;
        for (size_t i = 0; i < rep.t.size(); ++i)
          rows.push_back({num(rep.t[i]), num(rep.values[i].value), num(std::abs(rep.values[i].value))});
        table({"t", "value", "|value|"}, rows);
        std::printf("log-log slope %s, max/min %s\n", num(rep.slope).c_str(), num(rep.max_over_min).c_str());
      }
    } else if (perturb_cmd->parsed()) {
      const MomentModel model = ctx.need_model();
      CouplingMeasure rho = rho_arg == "sinh-gordon" ? CouplingMeasure::sinh_gordon() : load_coupling_file(rho_arg);
      if (trig) rho.trigonometric = true;
      doc["inputs"] = Json{{"rho", to_json(rho)}, {"lambda", lambda}};
      Json res = Json::object();
      if (!points.empty()) {
        const FirstOrderReport fo = first_order_schwinger(parse_points(points), lambda, rho, model, ctx.spec);
        res["schwinger"] = to_json(fo);
      }
      if (q >= 2) {
        res["wightman_term"] = to_json(first_order_wightman_term(q, model, rho));
        if (q >= 3 && !packets_path.empty()) {
          TGrid grid;
          grid.values = parse_csv(t_grid, "t-grid");
          const auto fo = first_order_smatrix(q, r, model, rho, load_packets_file(packets_path), grid, ctx.spec);
          const bool agree = std::abs(fo.closed_form.value.value - fo.limit_path.limit.value) <=
                             5e-2 * std::max(std::abs(fo.closed_form.value.value), std::abs(fo.limit_path.limit.value)) +
                                 fo.closed_form.value.err_est + fo.limit_path.limit.err_est;
          res["smatrix"] = Json{{"closed_form", to_json(fo.closed_form)},
                                {"limit_path", to_json(fo.limit_path)},
                                {"agree", agree},
                                {"q2_dipole_deviation", fo.q2_dipole_deviation},
                                {"q2_scale", fo.q2_scale}};
          pass = agree;
        }
      }
      if (res.empty()) throw ParseError("perturb needs --points or --q");
      doc["result"] = res;
    } else if (suite_cmd->parsed()) {
      SuiteOptions so;
      so.full = level == "full";
      so.seed = ctx.g.seed;
      so.spec = ctx.spec;
      std::vector<int> ids;
      for (double x : parse_csv(only, "criterion id")) ids.push_back(static_cast<int>(x));
      const SuiteRun run = run_suite(so, ids);
      doc["result"] = run.report;
      pass = run.pass;
      if (ctx.g.timings) {
        Json t = Json::array();
        for (size_t i = 0; i < run.results.size(); ++i) t.push_back(Json{{"id", run.results[i].id}, {"seconds", run.seconds[i]}});
        doc["timings"] = t;
      }
      if (ctx.g.emit_table) {
        std::vector<std::vector<std::string>> rows;
        for (size_t i = 0; i < run.results.size(); ++i)
          rows.push_back({std::to_string(run.results[i].id), run.results[i].pass ? "PASS" : "FAIL", run.results[i].summary});
        table({"id", "verdict", "measured"}, rows);
      }
    }

    doc["pass"] = pass;
    if (ctx.g.timings && !doc.contains("timings"))
      doc["timings"] = Json{{"seconds", std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count()}};
    // with --emit-table the JSON report only goes to an explicit --output
    if (!ctx.g.emit_table || !ctx.g.output.empty()) ctx.emit(doc);
    return pass ? 0 : 1;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
