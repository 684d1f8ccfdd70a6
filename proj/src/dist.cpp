#include "dipole/dist.hpp"

#include <algorithm>
#include <cmath>

namespace dipole {

const char* to_string(FactorKind k) {
  switch (k) {
    case FactorKind::Delta:
      return "delta";
    case FactorKind::DeltaPrime:
      return "delta_prime";
    case FactorKind::PVPow1:
      return "pv_pow1";
    case FactorKind::FPPow2:
      return "fp_pow2";
    case FactorKind::Smooth:
      return "smooth";
  }
  return "?";
}

FactorKind parse_factor_kind(const std::string& s) {
  if (s == "delta") return FactorKind::Delta;
  if (s == "delta_prime") return FactorKind::DeltaPrime;
  if (s == "pv_pow1") return FactorKind::PVPow1;
  if (s == "fp_pow2") return FactorKind::FPPow2;
  if (s == "smooth") return FactorKind::Smooth;
  throw ParseError("unknown factor kind '" + s + "'");
}

ShellFactor ShellFactor::delta(Sign s, double m) {
  ShellFactor f;
  f.kind = FactorKind::Delta;
  f.sign = s;
  f.mass = m;
  f.validate();
  return f;
}
ShellFactor ShellFactor::delta_prime(Sign s, double m) {
  ShellFactor f = delta(s, m);
  f.kind = FactorKind::DeltaPrime;
  return f;
}
ShellFactor ShellFactor::pv(double m) {
  ShellFactor f;
  f.kind = FactorKind::PVPow1;
  f.mass = m;
  f.validate();
  return f;
}
ShellFactor ShellFactor::fp(double m) {
  ShellFactor f = pv(m);
  f.kind = FactorKind::FPPow2;
  return f;
}
ShellFactor ShellFactor::smooth(double m) {
  ShellFactor f;
  f.mass = m;
  f.validate();
  return f;
}

void ShellFactor::validate() const {
  if (!(mass > 0)) throw InvalidArgument("shell factor mass must be positive");
  if (is_shell() && sign == Sign::None) throw InvalidArgument("delta factors need an energy sign");
  if (!is_shell() && sign != Sign::None) throw InvalidArgument("only delta factors carry an energy sign");
}

void DistExpr::validate() const {
  if (n_args < 1) throw InvalidArgument("distribution needs at least one argument");
  for (const auto& t : terms) {
    if (static_cast<int>(t.factors.size()) != n_args) throw DimensionMismatch("term factor count differs from n_args");
    if (!t.conservation.empty() && static_cast<int>(t.conservation.size()) != n_args)
      throw DimensionMismatch("conservation vector length differs from n_args");
    for (int s : t.conservation)
      if (s < -1 || s > 1) throw InvalidArgument("conservation entries must be -1, 0 or +1");
    for (const auto& f : t.factors) f.validate();
  }
}

DistExpr DistExpr::operator+(const DistExpr& o) const {
  if (o.n_args != n_args) throw DimensionMismatch("adding distributions of different arity");
  DistExpr r = *this;
  r.terms.insert(r.terms.end(), o.terms.begin(), o.terms.end());
  return r;
}

DistExpr DistExpr::scaled(cplx s) const {
  DistExpr r = *this;
  for (auto& t : r.terms) t.coeff *= s;
  return r;
}

DistExpr single_factor(const ShellFactor& f, cplx coeff) {
  DistExpr e;
  e.n_args = 1;
  e.terms.push_back(DistTerm{coeff, {f}, {}});
  e.validate();
  return e;
}

DistExpr apply_multiplier(const DistExpr& e, int var, const Multiplier& mult) {
  if (var < 0 || var >= e.n_args) throw InvalidArgument("apply_multiplier: variable index out of range");
  DistExpr r = e;
  for (auto& t : r.terms) {
    auto& f = t.factors[var];
    if (f.multiplier)
      f.multiplier = Multiplier::product({*f.multiplier, mult});
    else
      f.multiplier = mult;
  }
  return r;
}

std::pair<double, double> packet_window(const WavePacket& p, int axis, const QuadSpec& spec) {
  const double c = p.center()[axis], s = spec.truncation_radius * p.sigma(axis);
  return {c - s, c + s};
}

namespace {

template <class S>
S factor_weight(const ShellFactor& f, const WavePacket& p, const S& k0, const double* sp) {
  S v = p.eval(k0, sp);
  if (f.multiplier) v = v * eval_multiplier(*f.multiplier, k0, sp, p.dim());
  return v;
}

double norm2(const double* x, int n) {
  double s = 0.0;
  for (int i = 0; i < n; ++i) s += x[i] * x[i];
  return s;
}

SmearValue smear_shell(const ShellFactor& f, const WavePacket& p, const QuadSpec& spec) {
  const int d = p.dim();
  std::vector<double> lo(d - 1), hi(d - 1);
  for (int a = 1; a < d; ++a) std::tie(lo[a - 1], hi[a - 1]) = packet_window(p, a, spec);
  const double sg = sign_value(f.sign);
  const double m2 = f.mass * f.mass;
  if (f.kind == FactorKind::Delta) {
    return integrate_nd(
        [&](const double* x) {
          const double w = std::sqrt(norm2(x, d - 1) + m2);
          return factor_weight<cplx>(f, p, cplx(sg * w), x) / (2.0 * w);
        },
        lo, hi, spec);
  }
  // <delta', F> = -(1/2w) d/dk0 [F / (2 k0)] at k0 = +/- w
  return integrate_nd(
      [&](const double* x) {
        const double w = std::sqrt(norm2(x, d - 1) + m2);
        const Jet k0 = Jet::variable(sg * w, 0);
        const Jet v = factor_weight<Jet>(f, p, k0, x) * inv(k0 * 2.0);
        return -v.top(1) / (2.0 * w);
      },
      lo, hi, spec);
}

SmearValue smear_smooth(const ShellFactor& f, const WavePacket& p, const QuadSpec& spec) {
  const int d = p.dim();
  std::vector<double> lo(d), hi(d);
  for (int a = 0; a < d; ++a) std::tie(lo[a], hi[a]) = packet_window(p, a, spec);
  return integrate_nd([&](const double* x) { return factor_weight<cplx>(f, p, cplx(x[0]), x + 1); }, lo, hi, spec);
}

// PV (power 1) or FP (power 2) of F(k)/(k^2-m^2)^power. The shell window
// |s| < eps is handled per energy sheet in the variable s = k^2 - m^2 (density
// 1/(2|k0|)); FP is taken as d/d(m^2) of PV, which in s reads PV int H'(s)/s.
SmearValue smear_pole(const ShellFactor& f, const WavePacket& p, const QuadSpec& spec, const SmearOptions& opts) {
  const int d = p.dim();
  const int power = f.kind == FactorKind::PVPow1 ? 1 : 2;
  const double m2 = f.mass * f.mass;
  const double loc = f.multiplier ? f.multiplier->shell_support() : -1.0;
  const bool localized = loc > 0;
  const double eps = localized ? loc : opts.split_eps * m2;
  if (!(eps > 0 && eps < m2)) throw InvalidArgument("shell window must satisfy 0 < eps < m^2");
  const Cutoff window(eps, f.mass);
  const double t_max = f.multiplier ? f.multiplier->max_time() : 0.0;

  SmearValue total;
  for (double sg : {1.0, -1.0}) {
    std::vector<double> lo(d), hi(d);
    for (int a = 1; a < d; ++a) std::tie(lo[a - 1], hi[a - 1]) = packet_window(p, a, spec);
    lo[d - 1] = 0.0;
    hi[d - 1] = eps;
    std::vector<int> pieces(d, 1);
    pieces[d - 1] = oscillation_pieces(t_max * eps / (2.0 * std::sqrt(m2 - eps)));
    auto h_of = [&](double s, const double* sp, double w2) -> cplx {
      if (power == 1) {
        const cplx k0 = sg * std::sqrt(cplx(s + w2));
        cplx v = factor_weight<cplx>(f, p, k0, sp) / (2.0 * std::abs(k0));
        if (!localized) v *= window.phi(cplx(s));
        return v;
      }
      const Jet sj = Jet::variable(s, 0);
      const Jet k0 = sqrt(sj + Jet(w2)) * sg;
      Jet v = factor_weight<Jet>(f, p, k0, sp) * inv(k0 * (2.0 * sg));
      if (!localized) v = v * window.phi(sj);
      return v.top(1);
    };
    total += integrate_nd(
        [&](const double* x) {
          const double w2 = norm2(x, d - 1) + m2;
          const double v = x[d - 1];
          return (h_of(v, x, w2) - h_of(-v, x, w2)) / v;
        },
        lo, hi, spec, pieces);
  }
  if (!localized) {
    std::vector<double> lo(d), hi(d);
    for (int a = 0; a < d; ++a) std::tie(lo[a], hi[a]) = packet_window(p, a, spec);
    total += integrate_nd(
        [&](const double* x) {
          const double s = x[0] * x[0] - norm2(x + 1, d - 1) - m2;
          const double off = 1.0 - std::real(window.phi(cplx(s)));
          if (off == 0.0) return cplx(0.0);
          cplx v = factor_weight<cplx>(f, p, cplx(x[0]), x + 1) * off / s;
          return power == 2 ? v / s : v;
        },
        lo, hi, spec);
  }
  return total;
}

SmearValue smear_one(const ShellFactor& f, const WavePacket& p, const QuadSpec& spec, const SmearOptions& opts) {
  switch (f.kind) {
    case FactorKind::Delta:
    case FactorKind::DeltaPrime:
      return smear_shell(f, p, spec);
    case FactorKind::Smooth:
      return smear_smooth(f, p, spec);
    case FactorKind::PVPow1:
    case FactorKind::FPPow2:
      return smear_pole(f, p, spec, opts);
  }
  return {};
}

enum class Mode { Shell, Full, Elim };

struct VarPlan {
  int var;
  Mode mode;
  int slot = -1;   // jet generator for delta' factors
  int offset = 0;  // first coordinate in the integration vector
};

SmearValue smear_coupled(const DistTerm& term, const std::vector<int>& vars, const std::vector<WavePacket>& packets,
                         const QuadSpec& spec, const SmearOptions& opts) {
  const int d = packets[vars.front()].dim();
  const bool mollified = opts.conservation_sigma > 0;
  int elim = -1;
  if (!mollified) {
    for (int l : vars)
      if (term.factors[l].is_pole()) {
        elim = l;
        break;
      }
    if (elim < 0)
      for (auto it = vars.rbegin(); it != vars.rend(); ++it)
        if (term.factors[*it].kind == FactorKind::Smooth) {
          elim = *it;
          break;
        }
    if (elim < 0)
      throw InvalidArgument(
          "conservation delta over shell-only factors is over-determined; use a mollified conservation delta");
  }
  std::vector<VarPlan> plan;
  int offset = 0, slots = 0;
  for (int l : vars) {
    const auto& f = term.factors[l];
    VarPlan vp{l, Mode::Full};
    if (l == elim) {
      vp.mode = Mode::Elim;
    } else if (f.is_shell()) {
      vp.mode = Mode::Shell;
      if (f.kind == FactorKind::DeltaPrime) vp.slot = slots++;
    } else if (f.is_pole()) {
      throw InvalidArgument("only one PV/FP factor per conserved term is supported");
    }
    vp.offset = offset;
    offset += vp.mode == Mode::Shell ? d - 1 : (vp.mode == Mode::Full ? d : 0);
    plan.push_back(vp);
  }
  if (slots > Jet::kMaxVars) throw InvalidArgument("too many delta' factors in one term");
  if (offset > 4) throw InvalidArgument("coupled integral exceeds four dimensions");

  std::vector<double> lo(offset), hi(offset);
  for (const auto& vp : plan) {
    const WavePacket& p = packets[vp.var];
    if (vp.mode == Mode::Shell)
      for (int a = 1; a < d; ++a) std::tie(lo[vp.offset + a - 1], hi[vp.offset + a - 1]) = packet_window(p, a, spec);
    else if (vp.mode == Mode::Full)
      for (int a = 0; a < d; ++a) std::tie(lo[vp.offset + a], hi[vp.offset + a]) = packet_window(p, a, spec);
  }
  const double sigma = opts.conservation_sigma;
  const std::vector<int>& cons = term.conservation;

  auto integrand = [&](const double* x) -> cplx {
    std::vector<Jet> k0(term.factors.size());
    std::vector<std::array<double, kMaxDim>> sp(term.factors.size());
    Jet val(term.coeff);
    for (const auto& vp : plan) {
      if (vp.mode == Mode::Elim) continue;
      const auto& f = term.factors[vp.var];
      auto& s = sp[vp.var];
      if (vp.mode == Mode::Shell) {
        for (int a = 0; a < d - 1; ++a) s[a] = x[vp.offset + a];
        const double w = std::sqrt(norm2(s.data(), d - 1) + f.mass * f.mass);
        const double e0 = sign_value(f.sign) * w;
        if (vp.slot >= 0) {
          k0[vp.var] = Jet::variable(e0, vp.slot);
          val = val * inv(k0[vp.var] * 2.0) * (-1.0 / (2.0 * w));
        } else {
          k0[vp.var] = Jet(e0);
          val = val * (1.0 / (2.0 * w));
        }
      } else {
        k0[vp.var] = Jet(x[vp.offset]);
        for (int a = 0; a < d - 1; ++a) s[a] = x[vp.offset + 1 + a];
      }
      val = val * factor_weight<Jet>(f, packets[vp.var], k0[vp.var], s.data());
    }
    if (mollified) {
      Jet p0(0.0);
      std::array<double, kMaxDim> ps{};
      for (const auto& vp : plan) {
        const double sl = cons[vp.var];
        p0 += k0[vp.var] * sl;
        for (int a = 0; a < d - 1; ++a) ps[a] += sl * sp[vp.var][a];
      }
      const double norm = std::pow(2.0 * kPi * sigma * sigma, -0.5 * d);
      const Jet expo = (p0 * p0 + Jet(norm2(ps.data(), d - 1))) * (-0.5 / (sigma * sigma));
      val = val * exp(expo) * norm;
    } else {
      // k_e = -s_e sum_{l != e} s_l k_l
      const double se = cons[elim];
      Jet e0(0.0);
      auto& es = sp[elim];
      es.fill(0.0);
      for (const auto& vp : plan) {
        if (vp.mode == Mode::Elim) continue;
        const double sl = cons[vp.var];
        e0 -= k0[vp.var] * (se * sl);
        for (int a = 0; a < d - 1; ++a) es[a] -= se * sl * sp[vp.var][a];
      }
      const auto& f = term.factors[elim];
      val = val * factor_weight<Jet>(f, packets[elim], e0, es.data());
      if (f.is_pole()) {
        const double m2 = f.mass * f.mass;
        const Jet s = e0 * e0 - Jet(norm2(es.data(), d - 1) + m2);
        if (std::abs(s.value()) < opts.pole_margin * m2) {
          double mag = 0.0;
          for (int i = 0; i < val.size(); ++i) mag = std::max(mag, std::abs(val.coeff(i)));
          if (mag > opts.negligible)
            throw PoleProximity("eliminated pole variable comes within the pole margin on the packet support");
        }
        const Jet is = inv(s);
        val = val * is;
        if (f.kind == FactorKind::FPPow2) val = val * is;
      }
    }
    return val.top(slots);
  };
  return integrate_nd(integrand, lo, hi, spec);
}

}  // namespace

SmearValue smear_term(const DistTerm& term, const std::vector<WavePacket>& packets, const QuadSpec& spec,
                      const SmearOptions& opts) {
  const int n = static_cast<int>(term.factors.size());
  if (static_cast<int>(packets.size()) != n) throw DimensionMismatch("packet count differs from n_args");
  for (const auto& p : packets)
    if (p.dim() != packets.front().dim()) throw DimensionMismatch("packets of different dimension");
  std::vector<int> coupled;
  if (!term.conservation.empty())
    for (int l = 0; l < n; ++l)
      if (term.conservation[l] != 0) coupled.push_back(l);
  SmearValue result;
  result.value = term.coeff;
  for (int l = 0; l < n; ++l) {
    if (std::find(coupled.begin(), coupled.end(), l) != coupled.end()) continue;
    result = product(result, smear_one(term.factors[l], packets[l], spec, opts));
  }
  if (!coupled.empty()) {
    DistTerm unit = term;
    unit.coeff = 1.0;
    result = product(result, smear_coupled(unit, coupled, packets, spec, opts));
  }
  if (!result.tolerance_met && spec.strict) throw ToleranceNotMet("smear did not reach tolerance");
  return result;
}

SmearValue smear(const DistExpr& e, const std::vector<WavePacket>& packets, const QuadSpec& spec,
                 const SmearOptions& opts) {
  e.validate();
  spec.validate();
  if (static_cast<int>(packets.size()) != e.n_args) throw DimensionMismatch("packet count differs from n_args");
  SmearValue total;
  for (const auto& t : e.terms) total += smear_term(t, packets, spec, opts);
  return total;
}

SmearValue commutator_pairing(const DistExpr& e2, const WavePacket& f, const WavePacket& g, const QuadSpec& spec,
                              const SmearOptions& opts) {
  if (e2.n_args != 2) throw DimensionMismatch("commutator pairing needs a two-point distribution");
  return smear(e2, {f, g}, spec, opts) - smear(e2, {g, f}, spec, opts);
}

}  // namespace dipole
