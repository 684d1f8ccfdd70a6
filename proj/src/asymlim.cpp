#include "dipole/asymlim.hpp"

#include <algorithm>
#include <cmath>

namespace dipole {

namespace {

DistExpr shell_difference(int power, double mass, cplx coeff) {
  DistExpr e;
  e.n_args = 1;
  const auto make = power == 1 ? ShellFactor::delta : ShellFactor::delta_prime;
  e.terms.push_back(DistTerm{coeff, {make(Sign::Plus, mass)}, {}});
  e.terms.push_back(DistTerm{-coeff, {make(Sign::Minus, mass)}, {}});
  return e;
}

}  // namespace

LimitTarget LimitTarget::make(int power, Channel channel, double mass) {
  if (power != 1 && power != 2) throw InvalidArgument("pole power must be 1 or 2");
  LimitTarget t;
  t.pole_power = power;
  t.channel = channel;
  t.mass = mass;
  if (channel == Channel::Loc) {
    t.target_expr = single_factor(power == 1 ? ShellFactor::pv(mass) : ShellFactor::fp(mass));
    return t;
  }
  double s = channel == Channel::In ? 1.0 : -1.0;
  if (power == 1) s = -s;
  t.target_expr = shell_difference(power, mass, cplx(0.0, s * kPi));
  return t;
}

DistExpr LimitTarget::analogy_expr(int power, Channel channel, double mass) {
  if (channel == Channel::Loc || power == 2) return make(power, channel, mass).target_expr;
  const double s = channel == Channel::In ? 1.0 : -1.0;
  return shell_difference(1, mass, cplx(0.0, s * kPi));
}

void TGrid::validate() const {
  if (values.empty()) throw InvalidArgument("t-grid needs at least one value");
  for (size_t i = 0; i < values.size(); ++i) {
    if (!(values[i] > 0)) throw InvalidArgument("t-grid values must be positive");
    if (i > 0 && !(values[i] > values[i - 1])) throw InvalidArgument("t-grid must be strictly increasing");
  }
}

SmearValue finite_t_value(int power, Channel channel, double t, const WavePacket& packet, const QuadSpec& spec,
                          double mass, Cutoff cutoff) {
  if (power != 1 && power != 2) throw InvalidArgument("pole power must be 1 or 2");
  const ShellFactor f = power == 1 ? ShellFactor::pv(mass) : ShellFactor::fp(mass);
  DistExpr e = single_factor(f);
  if (channel != Channel::Loc) e = apply_multiplier(e, 0, Multiplier::chi_d_t(channel, t, mass, cutoff));
  return smear(e, {packet}, spec);
}

LimitReport limit_and_compare(const LimitTarget& target, const TGrid& grid, const WavePacket& packet,
                              const QuadSpec& spec, const LimitOptions& opts) {
  grid.validate();
  const Cutoff cut = opts.cutoff.eps > 0 ? Cutoff(opts.cutoff.eps, target.mass) : Cutoff::standard(target.mass);
  LimitReport rep;
  rep.power = target.pole_power;
  rep.channel = target.channel;
  rep.tol_final = opts.tol_final;
  rep.min_ratio = opts.min_ratio;
  const SmearValue tv = smear(target.target_expr, {packet}, spec);
  rep.target = tv.value;
  rep.target_err = tv.err_est;
  const double scale = std::max(std::abs(tv.value), 1e-300);
  for (double t : grid.values) {
    const SmearValue v = finite_t_value(target.pole_power, target.channel, t, packet, spec, target.mass, cut);
    rep.t.push_back(t);
    rep.values.push_back(v.value);
    rep.err_est.push_back(v.err_est);
    rep.deviations.push_back(std::abs(v.value - tv.value));
    rep.rel_deviations.push_back(rep.deviations.back() / scale);
    rep.noise_floor = std::max(rep.noise_floor, v.err_est + tv.err_est);
  }
  // A deviation inside the combined quadrature error counts as zero: such a
  // step passes the ratio test and the monotonicity test.
  const auto below = [&](double dv) { return dv <= rep.noise_floor; };
  bool ratios = true;
  for (size_t i = 0; i + 1 < rep.deviations.size(); ++i) {
    const double a = rep.deviations[i], b = rep.deviations[i + 1];
    const double r = b > 0 ? a / b : INFINITY;
    rep.decay_ratios.push_back(r);
    const bool ok = below(b) || r >= opts.min_ratio;
    rep.ratio_ok.push_back(ok);
    ratios = ratios && ok;
  }
  const size_t n = rep.deviations.size();
  for (size_t i = n >= 3 ? n - 3 : 0; i + 1 < n; ++i) {
    const double a = rep.deviations[i], b = rep.deviations[i + 1];
    if (!(b < a || below(b))) rep.monotone_tail = false;
    if (!(b < a) && !below(b)) rep.non_decaying = true;
  }
  if (n >= 3) {
    const cplx v0 = rep.values[n - 3], v1 = rep.values[n - 2], v2 = rep.values[n - 1];
    const cplx den = (v2 - v1) - (v1 - v0);
    if (std::abs(den) > 0) {
      rep.has_extrapolation = true;
      rep.extrapolated = v2 - (v2 - v1) * (v2 - v1) / den;
    }
  }
  const SmearValue av = smear(LimitTarget::analogy_expr(target.pole_power, target.channel, target.mass), {packet}, spec);
  if (std::abs(av.value) > 0) rep.analogy_constant = rep.values.back() * std::conj(av.value) / std::norm(av.value);
  const bool final_ok = rep.rel_deviations.back() <= opts.tol_final || below(rep.deviations.back());
  rep.pass = final_ok && ratios && rep.monotone_tail;
  if (opts.strict && rep.non_decaying)
    throw NonDecaying("deviation from the limit target does not decrease along the t-grid tail");
  return rep;
}

}  // namespace dipole
