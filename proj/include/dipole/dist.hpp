#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dipole/common.hpp"
#include "dipole/packet.hpp"
#include "dipole/quad.hpp"
#include "dipole/waveop.hpp"

namespace dipole {

enum class FactorKind { Delta, DeltaPrime, PVPow1, FPPow2, Smooth };
const char* to_string(FactorKind k);
FactorKind parse_factor_kind(const std::string& s);

struct ShellFactor {
  FactorKind kind = FactorKind::Smooth;
  Sign sign = Sign::None;
  double mass = 1.0;
  std::optional<Multiplier> multiplier;

  static ShellFactor delta(Sign s, double m);
  static ShellFactor delta_prime(Sign s, double m);
  static ShellFactor pv(double m);
  static ShellFactor fp(double m);
  static ShellFactor smooth(double m = 1.0);
  void validate() const;
  bool is_shell() const { return kind == FactorKind::Delta || kind == FactorKind::DeltaPrime; }
  bool is_pole() const { return kind == FactorKind::PVPow1 || kind == FactorKind::FPPow2; }
};

struct DistTerm {
  cplx coeff{1.0};
  std::vector<ShellFactor> factors;
  // delta(sum_l s_l k_l) with s_l in {+1, -1, 0}; empty means no constraint.
  std::vector<int> conservation;
};

struct DistExpr {
  int n_args = 1;
  std::vector<DistTerm> terms;

  void validate() const;
  DistExpr operator+(const DistExpr& o) const;
  DistExpr scaled(cplx s) const;
};

DistExpr single_factor(const ShellFactor& f, cplx coeff = 1.0);

struct SmearOptions {
  // Minimum |k^2 - m^2| of an eliminated pole variable, in units of m^2.
  double pole_margin = 0.05;
  // Half-width of the shell window used to split PV/FP factors, in units of
  // m^2 (ignored when a shell-localized multiplier provides its own window).
  double split_eps = 0.5;
  // > 0: replace the conservation delta by a normalized Gaussian of this
  // width and integrate every variable (no elimination).
  double conservation_sigma = 0.0;
  // Packet magnitude below which a pole-proximity hit is ignored.
  double negligible = 1e-12;
};

SmearValue smear(const DistExpr& e, const std::vector<WavePacket>& packets, const QuadSpec& spec,
                 const SmearOptions& opts = {});
SmearValue smear_term(const DistTerm& term, const std::vector<WavePacket>& packets, const QuadSpec& spec,
                      const SmearOptions& opts = {});

DistExpr apply_multiplier(const DistExpr& e, int var, const Multiplier& mult);

// smear(e2, f (x) g) - smear(e2, g (x) f)
SmearValue commutator_pairing(const DistExpr& e2, const WavePacket& f, const WavePacket& g, const QuadSpec& spec,
                              const SmearOptions& opts = {});

// Integration window of a packet along axis a: centre +/- R sigma_a.
std::pair<double, double> packet_window(const WavePacket& p, int axis, const QuadSpec& spec);

}  // namespace dipole
