#include "dipole/scatter.hpp"

#include <algorithm>
#include <cmath>

namespace dipole {

void ChannelAssignment::validate(int n) const {
  if (static_cast<int>(channels.size()) != n) throw DimensionMismatch("channel assignment length differs from n");
  if (!times.empty() && static_cast<int>(times.size()) != n)
    throw DimensionMismatch("time assignment length differs from n");
  for (double t : times)
    if (!(t >= 0)) throw InvalidArgument("channel times must be non-negative");
}

void RegSpec::validate() const {
  if (!(sigma0 > 0)) throw InvalidArgument("regularization width must be positive");
  if (levels < 2) throw InvalidArgument("regularization needs at least two levels");
}

namespace {

Multiplier make_multiplier(MultKind kind, Channel ch, double t, double mass, const Cutoff& cut) {
  switch (kind) {
    case MultKind::ChiT:
      return Multiplier::chi_t(ch, t, mass, cut);
    case MultKind::HaagRuelleOnly:
      return Multiplier::haag_ruelle(ch, t, mass, cut);
    case MultKind::ChiDT:
      return Multiplier::chi_d_t(ch, t, mass, cut);
    default:
      throw InvalidArgument("channel multipliers must be chi_t, chi_d_t or haag_ruelle");
  }
}

void check_packets(int n, const std::vector<WavePacket>& packets, const MomentModel& model) {
  if (static_cast<int>(packets.size()) != n) throw DimensionMismatch("packet count differs from n");
  for (const auto& p : packets)
    if (p.dim() != model.dim) throw DimensionMismatch("packet dimension differs from model dimension");
}

void add_shell_difference(DistExpr& e, const DistTerm& base, int j, cplx coeff, double mass) {
  for (Sign s : {Sign::Plus, Sign::Minus}) {
    DistTerm t = base;
    t.factors[j] = ShellFactor::delta_prime(s, mass);
    t.coeff = base.coeff * (s == Sign::Plus ? coeff : -coeff);
    e.terms.push_back(std::move(t));
  }
}

}  // namespace

RegReport mollified_smear(const DistExpr& e, const std::vector<WavePacket>& packets, const QuadSpec& spec,
                          const RegSpec& reg) {
  reg.validate();
  for (const auto& t : e.terms)
    for (const auto& f : t.factors)
      if (f.is_pole()) throw InvalidArgument("mollified smear expects shell and smooth factors only");
  RegReport rep;
  const int L = reg.levels;
  std::vector<std::vector<cplx>> R(L);
  int fails = 0;
  for (int k = 0; k < L; ++k) {
    const double sigma = reg.sigma0 / std::pow(2.0, k);
    SmearOptions opts;
    opts.conservation_sigma = sigma;
    rep.sigmas.push_back(sigma);
    rep.levels.push_back(smear(e, packets, spec, opts));
    R[k].push_back(rep.levels[k].value);
    for (int j = 1; j <= k; ++j)
      R[k].push_back(R[k][j - 1] + (R[k][j - 1] - R[k - 1][j - 1]) / (std::pow(4.0, j) - 1.0));
    rep.extrapolants.push_back(R[k][k]);
    if (k >= 1) {
      const double diff = std::abs(rep.levels[k].value - rep.levels[k - 1].value);
      const double prev = k == 1 ? std::abs(rep.levels[0].value)
                                 : std::abs(rep.levels[k - 1].value - rep.levels[k - 2].value);
      const double floor = rep.levels[k].err_est + rep.levels[k - 1].err_est + spec.abs_tol;
      const bool ok = diff < prev || diff <= floor;
      rep.contraction_ok.push_back(ok);
      fails = ok ? 0 : fails + 1;
      if (fails >= 3) {
        rep.converged = false;
        throw RegularizationNotConverged("mollified sequence fails the contraction check at three consecutive levels");
      }
    }
  }
  double quad_err = 0.0;
  long evals = 0;
  bool met = true;
  for (const auto& v : rep.levels) {
    quad_err = std::max(quad_err, v.err_est);
    evals += v.n_evals;
    met = met && v.tolerance_met;
  }
  rep.value.value = rep.extrapolants.back();
  // Neville weights on a ratio-4 grid sum in magnitude to below 2 per order.
  rep.value.err_est = std::abs(rep.extrapolants[L - 1] - rep.extrapolants[L - 2]) + std::pow(2.0, L - 1) * quad_err;
  rep.value.n_evals = evals;
  rep.value.tolerance_met = met;
  return rep;
}

SmearValue finite_time_wightman(int n, const ChannelAssignment& assign, const MomentModel& model,
                                const std::vector<WavePacket>& packets, const QuadSpec& spec, MultKind kind,
                                double cutoff_eps, const SmearOptions& opts) {
  assign.validate(n);
  check_packets(n, packets, model);
  const double m = model.mass;
  const Cutoff cut = cutoff_eps > 0 ? Cutoff(cutoff_eps, m) : Cutoff::standard(m);
  DistExpr e = wightman_truncated(n, model);
  for (int l = 0; l < n; ++l)
    if (assign.channels[l] != Channel::Loc)
      e = apply_multiplier(e, l, make_multiplier(kind, assign.channels[l], assign.time(l), m, cut));
  return smear(e, packets, spec, opts);
}

DistExpr form_factor_expr(int n, const std::vector<Channel>& channels, const MomentModel& model) {
  if (static_cast<int>(channels.size()) != n) throw DimensionMismatch("channel assignment length differs from n");
  const DistExpr w = wightman_truncated(n, model);
  if (n == 2) return w;
  DistExpr e;
  e.n_args = n;
  for (int j = 0; j < n; ++j) {
    const DistTerm& t = w.terms[j];
    switch (channels[j]) {
      case Channel::Loc:
        e.terms.push_back(t);
        break;
      case Channel::In:
        add_shell_difference(e, t, j, cplx(0.0, kPi), model.mass);
        break;
      case Channel::Out:
        add_shell_difference(e, t, j, cplx(0.0, -kPi), model.mass);
        break;
    }
  }
  return e;
}

FormFactorReport form_factor(int n, const ChannelAssignment& assign, const MomentModel& model,
                             const std::vector<WavePacket>& packets, const QuadSpec& spec, const RegSpec& reg) {
  assign.validate(n);
  check_packets(n, packets, model);
  const DistExpr e = form_factor_expr(n, assign.channels, model);
  DistExpr exact, shells;
  exact.n_args = shells.n_args = n;
  for (const auto& t : e.terms) {
    const bool has_pole = std::any_of(t.factors.begin(), t.factors.end(), [](const ShellFactor& f) {
      return f.is_pole() || f.kind == FactorKind::Smooth;
    });
    (has_pole ? exact : shells).terms.push_back(t);
  }
  FormFactorReport rep;
  if (!exact.terms.empty()) rep.exact_part = smear(exact, packets, spec);
  if (!shells.terms.empty()) {
    rep.regularization = mollified_smear(shells, packets, spec, reg);
    rep.mollified_part = rep.regularization->value;
  }
  rep.value = rep.exact_part + rep.mollified_part;
  return rep;
}

DistExpr smatrix_expr(int n, int r, const MomentModel& model) {
  if (n < 3) throw InvalidArgument("the truncated S-matrix formula needs n >= 3");
  if (r < 1 || r >= n) throw InvalidArgument("need 1 <= r < n");
  DistTerm t;
  t.coeff = cplx(0.0, 2.0 * kPi * model.c_tilde(n));
  for (int l = 0; l < n; ++l) {
    t.factors.push_back(ShellFactor::delta_prime(Sign::Plus, model.mass));
    t.conservation.push_back(l < r ? 1 : -1);
  }
  return DistExpr{n, {t}};
}

RegReport smatrix_truncated(int n, int r, const MomentModel& model, const std::vector<WavePacket>& packets,
                            const QuadSpec& spec, const RegSpec& reg) {
  check_packets(n, packets, model);
  return mollified_smear(smatrix_expr(n, r, model), packets, spec, reg);
}

LimitPathReport smatrix_limit_path(int n, int r, const MomentModel& model, const std::vector<WavePacket>& packets,
                                   const TGrid& grid, const QuadSpec& spec, MultKind kind) {
  if (r < 1 || r >= n) throw InvalidArgument("need 1 <= r < n");
  check_packets(n, packets, model);
  grid.validate();
  std::vector<WavePacket> args;
  ChannelAssignment assign;
  for (int l = 0; l < n; ++l) {
    args.push_back(l < r ? packet_reflect(packets[l]) : packets[l]);
    assign.channels.push_back(l < r ? Channel::In : Channel::Out);
  }
  LimitPathReport rep;
  for (double t : grid.values) {
    assign.times.assign(n, t);
    rep.t.push_back(t);
    rep.values.push_back(finite_time_wightman(n, assign, model, args, spec, kind));
    if (rep.values.size() > 1)
      rep.increments.push_back(std::abs(rep.values.back().value - rep.values[rep.values.size() - 2].value));
  }
  rep.limit = rep.values.back();
  return rep;
}

DivergenceReport divergence_demo(int n, const MomentModel& model, const std::vector<WavePacket>& packets,
                                 const std::vector<Channel>& channels, const TGrid& grid, MultKind kind,
                                 const QuadSpec& spec) {
  if (n < 3) throw InvalidArgument("divergence demo needs n >= 3");
  grid.validate();
  DivergenceReport rep;
  rep.kind = kind;
  rep.channels = channels;
  ChannelAssignment assign{channels, {}};
  double vmax = 0.0, vmin = INFINITY;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (double t : grid.values) {
    assign.times.assign(n, t);
    const SmearValue v = finite_time_wightman(n, assign, model, packets, spec, kind);
    rep.t.push_back(t);
    rep.values.push_back(v);
    const double a = std::abs(v.value);
    vmax = std::max(vmax, a);
    vmin = std::min(vmin, a);
    const double x = std::log(t), y = std::log(std::max(a, 1e-300));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double N = static_cast<double>(grid.values.size());
  if (N >= 2) {
    rep.slope = (N * sxy - sx * sy) / (N * sxx - sx * sx);
    rep.intercept = (sy - rep.slope * sx) / N;
  }
  rep.max_over_min = vmin > 0 ? vmax / vmin : INFINITY;
  rep.growing = rep.slope >= rep.min_slope;
  rep.bounded = rep.max_over_min <= rep.max_ratio;
  return rep;
}

}  // namespace dipole
