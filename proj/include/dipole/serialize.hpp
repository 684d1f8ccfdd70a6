#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "dipole/perturb.hpp"

namespace dipole {

using Json = nlohmann::ordered_json;

// 64-bit linear congruential generator, x <- a x + c mod 2^64 with Knuth's
// MMIX constants; doubles are the top 53 bits scaled to [0, 1).
class Lcg {
 public:
  static constexpr std::uint64_t kA = 6364136223846793005ULL;
  static constexpr std::uint64_t kC = 1442695040888963407ULL;
  static constexpr const char* kName = "lcg64-mmix";
  explicit Lcg(std::uint64_t seed) : state_(seed) {}
  std::uint64_t next() { return state_ = state_ * kA + kC; }
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

 private:
  std::uint64_t state_;
};

// Packet with a random centre near the mass shell of the given energy sign
// (Sign::None: either sign), random correlated widths, phase shift and a
// degree-one polynomial prefactor.
WavePacket random_packet(Lcg& rng, int dim, Sign energy = Sign::None, double mass = 1.0);

Json to_json(cplx z);
cplx cplx_from_json(const Json& j);
Json to_json(const SmearValue& v);
Json to_json(const QuadSpec& q);
QuadSpec quad_spec_from_json(const Json& j, QuadSpec base = {});

Json to_json(const WavePacket& p);
WavePacket packet_from_json(const Json& j);
Json to_json(const Multiplier& m);
Multiplier multiplier_from_json(const Json& j);
Json to_json(const DistExpr& e);
DistExpr dist_expr_from_json(const Json& j);
Json to_json(const MomentModel& m);
MomentModel model_from_json(const Json& j);
Json to_json(const CouplingMeasure& r);
CouplingMeasure coupling_from_json(const Json& j);

Json to_json(const LemmaReport& r);
Json to_json(const LimitReport& r);
Json to_json(const RegReport& r);
Json to_json(const LimitPathReport& r);
Json to_json(const DivergenceReport& r);
Json to_json(const FirstOrderReport& r);

// Parses text; syntax errors and schema errors raise ParseError with a
// "<source>:<line>:<column>" prefix.
Json parse_json_text(const std::string& text, const std::string& source);
Json load_json_file(const std::string& path);
std::vector<WavePacket> load_packets_file(const std::string& path);
MomentModel load_model_file(const std::string& path);
CouplingMeasure load_coupling_file(const std::string& path);
DistExpr load_dist_file(const std::string& path);

std::string dump(const Json& j);  // two-space indent, trailing newline

}  // namespace dipole
