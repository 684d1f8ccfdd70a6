#include "dipole/perturb.hpp"

#include <algorithm>
#include <cmath>

namespace dipole {

CouplingMeasure CouplingMeasure::sinh_gordon() { return CouplingMeasure{{{-1.0, 0.5}, {1.0, 0.5}}, false}; }

void CouplingMeasure::validate() const {
  if (atoms.empty()) throw InvalidArgument("coupling measure needs at least one atom");
  double total = 0.0;
  for (const auto& [a, w] : atoms) {
    if (!(w >= 0)) throw InvalidArgument("coupling measure weights must be non-negative");
    if (!(std::abs(a) < std::sqrt(4.0 * kPi))) throw InvalidArgument("coupling measure support must lie in (-sqrt(4 pi), sqrt(4 pi))");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-12) throw InvalidArgument("coupling measure weights must sum to 1");
}

cplx CouplingMeasure::moment(int q) const {
  if (q < 0) throw InvalidArgument("negative moment order");
  double mu = 0.0;
  for (const auto& [a, w] : atoms) mu += w * std::pow(a, q);
  if (!trigonometric) return mu;
  static const cplx ipow[4] = {1.0, kI, -1.0, -kI};
  return ipow[q % 4] * mu;
}

bool CouplingMeasure::symmetric() const {
  for (const auto& [a, w] : atoms) {
    double mirror = 0.0;
    for (const auto& [b, v] : atoms)
      if (b == -a) mirror += v;
    double self = 0.0;
    for (const auto& [b, v] : atoms)
      if (b == a) self += v;
    if (std::abs(mirror - self) > 1e-15) return false;
  }
  return true;
}

std::vector<SubsetPairing> subset_pairings(int n) {
  if (n < 0) throw InvalidArgument("negative set size");
  std::vector<SubsetPairing> out;
  for (int s = 0; s <= n; ++s) {
    if ((n - s) % 2) continue;
    std::vector<bool> pick(n, false);
    std::fill(pick.begin(), pick.begin() + s, true);
    // prev_permutation over a descending-true mask walks subsets in lexicographic order
    do {
      std::vector<int> subset, rest;
      for (int i = 0; i < n; ++i) (pick[i] ? subset : rest).push_back(i);
      for (Partition& p : pair_partitions(rest)) out.push_back({subset, std::move(p)});
    } while (std::prev_permutation(pick.begin(), pick.end()));
  }
  return out;
}

double free_kernel(const std::vector<double>& a, const std::vector<double>& b, double mass) {
  std::vector<double> d(a.size());
  for (size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
  return euclid_kernel(1, d, mass);
}

namespace {

void check_points(const std::vector<std::vector<double>>& points, const std::vector<double>* x, int dim) {
  auto close = [](const std::vector<double>& a, const std::vector<double>& b) {
    double r2 = 0.0;
    for (size_t i = 0; i < a.size(); ++i) r2 += (a[i] - b[i]) * (a[i] - b[i]);
    return r2 < 1e-24;
  };
  for (size_t i = 0; i < points.size(); ++i) {
    if (static_cast<int>(points[i].size()) != dim) throw DimensionMismatch("point dimension differs from model dimension");
    if (x && close(points[i], *x)) throw CoincidentPoints("a point coincides with the insertion point");
    for (size_t j = 0; j < i; ++j)
      if (close(points[i], points[j])) throw CoincidentPoints("two points coincide");
  }
}

double pairing_sum(const std::vector<std::vector<double>>& points, const std::vector<int>& rest, double mass) {
  double sum = 0.0;
  for (const Partition& p : pair_partitions(rest)) {
    double prod = 1.0;
    for (const Block& b : p) prod *= free_kernel(points[b[0]], points[b[1]], mass);
    sum += prod;
  }
  return sum;
}

std::vector<int> complement(const std::vector<int>& subset, int n) {
  std::vector<int> rest;
  for (int i = 0; i < n; ++i)
    if (std::find(subset.begin(), subset.end(), i) == subset.end()) rest.push_back(i);
  return rest;
}

// int_{R^2} prod_{j in S} G(x_j - x) dx
SmearValue star_integral(const std::vector<std::vector<double>>& pts, double mass, const QuadSpec& spec) {
  const int s = static_cast<int>(pts.size());
  const double L = 3.0 * spec.truncation_radius / (s * mass);
  std::vector<double> lo(2), hi(2);
  for (int a = 0; a < 2; ++a) {
    lo[a] = hi[a] = pts[0][a];
    for (const auto& p : pts) {
      lo[a] = std::min(lo[a], p[a]);
      hi[a] = std::max(hi[a], p[a]);
    }
    lo[a] -= L;
    hi[a] += L;
  }
  const FnN g = [&](const double* x) {
    double prod = 1.0;
    for (const auto& p : pts) {
      // a node landing exactly on a point is moved off the (integrable) log singularity
      const double r = std::max(std::hypot(x[0] - p[0], x[1] - p[1]), 1e-12);
      prod *= euclid_kernel(1, {r, 0.0}, mass);
    }
    return cplx(prod);
  };
  const int pieces = std::max(4, static_cast<int>(std::ceil((hi[0] - lo[0]) * mass / 2.0)));
  return integrate_nd(g, lo, hi, spec, {pieces, pieces});
}

}  // namespace

double wick_exp_correlation(const std::vector<std::vector<double>>& points, const std::vector<double>& x,
                            double alpha, const MomentModel& model) {
  model.validate();
  if (model.dim != 2) throw InvalidArgument("Wick exponential correlations are implemented for d = 2");
  if (static_cast<int>(x.size()) != model.dim) throw DimensionMismatch("insertion point dimension differs from model dimension");
  check_points(points, &x, model.dim);
  const int n = static_cast<int>(points.size());
  double total = 0.0;
  for (int s = 0; s <= n; ++s) {
    if ((n - s) % 2) continue;
    std::vector<bool> pick(n, false);
    std::fill(pick.begin(), pick.begin() + s, true);
    do {
      std::vector<int> subset, rest;
      for (int i = 0; i < n; ++i) (pick[i] ? subset : rest).push_back(i);
      double star = std::pow(alpha, s);
      for (int j : subset) star *= free_kernel(points[j], x, model.mass);
      total += star * pairing_sum(points, rest, model.mass);
    } while (std::prev_permutation(pick.begin(), pick.end()));
  }
  return total;
}

FirstOrderReport first_order_schwinger(const std::vector<std::vector<double>>& points, double lambda,
                                       const CouplingMeasure& rho, const MomentModel& model, const QuadSpec& spec) {
  model.validate();
  rho.validate();
  if (model.dim != 2) throw InvalidArgument("first-order Schwinger functions are implemented for d = 2");
  const int n = static_cast<int>(points.size());
  if (n < 1 || n > 4) throw InvalidArgument("first-order Schwinger functions need 1 <= n <= 4");
  check_points(points, nullptr, model.dim);
  FirstOrderReport rep;
  std::vector<int> all(n);
  for (int i = 0; i < n; ++i) all[i] = i;
  rep.free_part = pairing_sum(points, all, model.mass);
  for (int s = 1; s <= n; ++s) {
    if ((n - s) % 2) continue;
    std::vector<bool> pick(n, false);
    std::fill(pick.begin(), pick.begin() + s, true);
    do {
      SubsetContribution c;
      for (int i = 0; i < n; ++i)
        if (pick[i]) c.subset.push_back(i);
      c.moment = rho.moment(s);
      c.pairing_factor = pairing_sum(points, complement(c.subset, n), model.mass);
      if (c.moment != cplx(0.0) && lambda != 0.0 && c.pairing_factor != 0.0) {
        std::vector<std::vector<double>> pts;
        for (int j : c.subset) pts.push_back(points[j]);
        const SmearValue iv = star_integral(pts, model.mass, spec);
        c.integral = iv.value.real();
        c.integral_err = iv.err_est;
        c.value = -0.5 * lambda * c.moment * c.integral * c.pairing_factor;
        rep.err_est += 0.5 * std::abs(lambda * c.moment * c.pairing_factor) * iv.err_est;
      }
      rep.correction += c.value;
      rep.terms.push_back(std::move(c));
    } while (std::prev_permutation(pick.begin(), pick.end()));
  }
  rep.value = rep.free_part + rep.correction;
  return rep;
}

DistExpr first_order_wightman_term(int q, const MomentModel& model, const CouplingMeasure& rho, double q2_constant) {
  model.validate();
  rho.validate();
  if (q < 2) throw InvalidArgument("first-order Wightman terms start at q = 2");
  const double m = model.mass;
  DistExpr e;
  e.n_args = q;
  if (q == 2) {
    e.terms.push_back(DistTerm{-q2_constant * rho.moment(2) / std::pow(m, 4),
                               {ShellFactor::delta_prime(Sign::Minus, m), ShellFactor::smooth(m)},
                               {1, 1}});
    return e;
  }
  const cplx coeff = std::pow(2.0 * kPi, 0.5 * (model.dim * (q - 2) - 2)) * rho.moment(q);
  for (int j = 0; j < q; ++j) {
    DistTerm t;
    t.coeff = coeff;
    for (int l = 0; l < q; ++l) {
      if (l < j) t.factors.push_back(ShellFactor::delta(Sign::Minus, m));
      else if (l == j) t.factors.push_back(ShellFactor::pv(m));
      else t.factors.push_back(ShellFactor::delta(Sign::Plus, m));
    }
    t.conservation.assign(q, 1);
    e.terms.push_back(std::move(t));
  }
  return e;
}

Q2Constant q2_fitted_constant(double lambda, const CouplingMeasure& rho, const MomentModel& model,
                              const std::vector<double>& separation, const QuadSpec& spec) {
  rho.validate();
  const std::vector<std::vector<double>> pts{{0.0, 0.0}, separation};
  const SmearValue iv = star_integral(pts, model.mass, spec);
  const cplx mu2 = rho.moment(2);
  const cplx term = -0.5 * lambda * mu2 * iv.value.real();
  const double shape = euclid_kernel(2, separation, model.mass) / std::pow(model.mass, 4);
  Q2Constant c;
  if (mu2 == cplx(0.0)) return c;
  c.constant = term / (mu2 * shape);
  c.err_est = 0.5 * std::abs(lambda) * iv.err_est / shape;
  return c;
}

DistExpr first_order_smatrix_expr(int q, int r, const MomentModel& model, const CouplingMeasure& rho) {
  if (q < 3) throw InvalidArgument("first-order scattering needs q >= 3");
  if (r < 1 || r >= q) throw InvalidArgument("need 1 <= r < q");
  DistTerm t;
  t.coeff = cplx(0.0, 2.0 * kPi) * std::pow(2.0 * kPi, 0.5 * (model.dim * (q - 2) - 2)) * rho.moment(q);
  for (int l = 0; l < q; ++l) {
    t.factors.push_back(ShellFactor::delta(Sign::Plus, model.mass));
    t.conservation.push_back(l < r ? 1 : -1);
  }
  return DistExpr{q, {t}};
}

FirstOrderSMatrixReport first_order_smatrix(int q, int r, const MomentModel& model, const CouplingMeasure& rho,
                                            const std::vector<WavePacket>& packets, const TGrid& grid,
                                            const QuadSpec& spec, const RegSpec& reg, bool run_limit_path) {
  model.validate();
  rho.validate();
  if (static_cast<int>(packets.size()) != q) throw DimensionMismatch("packet count differs from q");
  FirstOrderSMatrixReport rep;
  rep.closed_form = mollified_smear(first_order_smatrix_expr(q, r, model, rho), packets, spec, reg);

  const double m = model.mass;
  const Cutoff cut = Cutoff::standard(m);
  std::vector<WavePacket> args;
  for (int l = 0; l < q; ++l) args.push_back(l < r ? packet_reflect(packets[l]) : packets[l]);
  if (run_limit_path) {
    grid.validate();
    const DistExpr base = first_order_wightman_term(q, model, rho);
    for (double t : grid.values) {
      DistExpr e = base;
      for (int l = 0; l < q; ++l) e = apply_multiplier(e, l, Multiplier::chi_t(l < r ? Channel::In : Channel::Out, t, m, cut));
      rep.limit_path.t.push_back(t);
      rep.limit_path.values.push_back(smear(e, args, spec));
      const auto& v = rep.limit_path.values;
      if (v.size() > 1) rep.limit_path.increments.push_back(std::abs(v.back().value - v[v.size() - 2].value));
    }
    rep.limit_path.limit = rep.limit_path.values.back();
  }

  // The q = 2 dipole term under chi^d in/out multipliers stays the free
  // two-point pairing: no scattering contribution.
  const DistExpr w2 = first_order_wightman_term(2, model, rho);
  const std::vector<WavePacket> pair{args[0], packets[q - 1]};
  const SmearValue plain = smear(w2, pair, spec);
  rep.q2_scale = std::abs(plain.value);
  for (double t : grid.values) {
    DistExpr e = apply_multiplier(w2, 0, Multiplier::chi_d_t(Channel::In, t, m, cut));
    e = apply_multiplier(e, 1, Multiplier::chi_d_t(Channel::Out, t, m, cut));
    rep.q2_dipole_deviation = std::max(rep.q2_dipole_deviation, std::abs(smear(e, pair, spec).value - plain.value));
  }
  return rep;
}

}  // namespace dipole
