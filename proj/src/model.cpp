#include "dipole/model.hpp"

#include <algorithm>
#include <boost/math/special_functions/bessel.hpp>
#include <cmath>

namespace dipole {

MomentModel MomentModel::poisson(double mass, int dim, double lambda, double a, int n_max) {
  MomentModel m;
  m.mass = mass;
  m.dim = dim;
  m.generator = PoissonGenerator{lambda, a};
  m.c = lambda * a * a;
  for (int n = 2; n <= n_max; ++n) m.cumulants[n] = lambda * std::pow(a, n);
  m.validate();
  return m;
}

void MomentModel::validate() const {
  if (!(mass > 0)) throw InvalidArgument("model mass must be positive");
  if (dim < 2) throw InvalidArgument("model dimension must be at least 2");
  for (const auto& [n, v] : cumulants)
    if (n < 2) throw InvalidArgument("cumulants are indexed from n = 2");
  auto it = cumulants.find(2);
  if (it != cumulants.end() && std::abs(it->second - c) > 1e-12 * std::max(1.0, std::abs(c)))
    throw InvalidArgument("c_2 must equal the variance constant c");
  if (generator) {
    const double expect = generator->lambda * generator->a * generator->a;
    if (std::abs(expect - c) > 1e-12 * std::max(1.0, std::abs(c)))
      throw InvalidArgument("c must equal lambda a^2 for the Poisson generator");
  }
}

double MomentModel::cumulant(int n) const {
  if (n < 2) throw InvalidArgument("cumulants are indexed from n = 2");
  auto it = cumulants.find(n);
  if (it != cumulants.end()) return it->second;
  if (n == 2) return c;
  if (generator) return generator->lambda * std::pow(generator->a, n);
  throw InvalidArgument("cumulant c_" + std::to_string(n) + " not supplied");
}

double MomentModel::c_tilde(int n) const {
  return std::pow(2.0 * kPi, 0.5 * (dim * (n - 2) - 2)) * cumulant(n);
}

MomentModel MomentModel::scaled_cumulants(double factor) const {
  MomentModel m = *this;
  m.c *= factor;
  for (auto& [n, v] : m.cumulants) v *= factor;
  if (m.generator) m.generator->lambda *= factor;
  return m;
}

long long bell_number(int n) {
  if (n < 0) throw InvalidArgument("Bell number of a negative size");
  // Bell triangle
  std::vector<long long> row{1};
  for (int i = 0; i < n; ++i) {
    std::vector<long long> next{row.back()};
    for (long long v : row) next.push_back(next.back() + v);
    row = std::move(next);
  }
  return row.front();
}

std::vector<Partition> set_partitions(int n) {
  if (n < 0) throw InvalidArgument("negative set size");
  std::vector<Partition> out;
  if (n == 0) {
    out.push_back({});
    return out;
  }
  std::vector<int> a(n, 0), b(n, 0);  // a: growth string, b[i] = max(a[0..i-1]) + 1
  while (true) {
    const int nb = *std::max_element(a.begin(), a.end()) + 1;
    Partition p(nb);
    for (int i = 0; i < n; ++i) p[a[i]].push_back(i);
    out.push_back(std::move(p));
    int i = n - 1;
    while (i > 0) {
      b[i] = *std::max_element(a.begin(), a.begin() + i) + 1;
      if (a[i] < b[i]) break;
      --i;
    }
    if (i == 0) break;
    ++a[i];
    std::fill(a.begin() + i + 1, a.end(), 0);
  }
  return out;
}

std::vector<Partition> set_partitions_recursive(int n) {
  if (n < 0) throw InvalidArgument("negative set size");
  std::vector<Partition> cur{Partition{}};
  for (int k = 0; k < n; ++k) {
    std::vector<Partition> next;
    for (const Partition& p : cur) {
      Partition fresh = p;
      fresh.push_back({k});
      next.push_back(std::move(fresh));
      for (size_t b = 0; b < p.size(); ++b) {
        Partition q = p;
        q[b].push_back(k);
        next.push_back(std::move(q));
      }
    }
    cur = std::move(next);
  }
  return cur;
}

std::vector<Partition> pair_partitions(const std::vector<int>& elements) {
  std::vector<Partition> out;
  if (elements.empty()) {
    out.push_back({});
    return out;
  }
  if (elements.size() % 2) return out;
  const int first = elements[0];
  for (size_t j = 1; j < elements.size(); ++j) {
    std::vector<int> rest;
    for (size_t l = 1; l < elements.size(); ++l)
      if (l != j) rest.push_back(elements[l]);
    for (Partition p : pair_partitions(rest)) {
      p.insert(p.begin(), Block{first, elements[j]});
      out.push_back(std::move(p));
    }
  }
  return out;
}

long long double_factorial_odd(int n) {
  if (n < 0 || n % 2) return 0;
  long long r = 1;
  for (int k = n - 1; k > 1; k -= 2) r *= k;
  return r;
}

double euclid_kernel(int order, const std::vector<double>& x, double mass) {
  if (order != 1 && order != 2) throw InvalidArgument("kernel order must be 1 or 2");
  if (x.size() < 2) throw InvalidArgument("kernel needs d >= 2");
  if (!(mass > 0)) throw InvalidArgument("mass must be positive");
  double r2 = 0.0;
  for (double v : x) r2 += v * v;
  const double r = std::sqrt(r2);
  if (r < 1e-12) throw OriginSingularity("Euclidean kernel evaluated at the origin");
  const int d = static_cast<int>(x.size());
  const double nu = 0.5 * d - 1.0;
  const double pref = std::pow(2.0 * kPi, -0.5 * d);
  const double z = mass * r;
  using boost::math::cyl_bessel_k;
  if (order == 1) return pref * std::pow(mass / r, nu) * cyl_bessel_k(nu, z);
  // -d/d(m^2) of the order-1 kernel, via d/dz[z^nu K_nu(z)] = -z^nu K_{nu-1}(z)
  return 0.5 * pref * std::pow(r, 1.0 - nu) * std::pow(mass, nu - 1.0) * cyl_bessel_k(std::abs(nu - 1.0), z);
}

double euclid_kernel(int order, const std::vector<double>& x, const MomentModel& model) {
  if (static_cast<int>(x.size()) != model.dim) throw DimensionMismatch("point dimension differs from model dimension");
  return euclid_kernel(order, x, model.mass);
}

SchwingerValue schwinger_truncated(int n, const std::vector<std::vector<double>>& points, const MomentModel& model,
                                   const QuadSpec& spec) {
  model.validate();
  if (n < 2) throw InvalidArgument("truncated Schwinger functions start at n = 2");
  if (static_cast<int>(points.size()) != n) throw DimensionMismatch("number of points differs from n");
  for (const auto& p : points)
    if (static_cast<int>(p.size()) != model.dim) throw DimensionMismatch("point dimension differs from model dimension");
  const double m = model.mass;
  if (n == 2) {
    std::vector<double> dx(model.dim);
    for (int a = 0; a < model.dim; ++a) dx[a] = points[0][a] - points[1][a];
    return {model.c / std::pow(m, 4) * euclid_kernel(2, dx, m), 0.0, 1};
  }
  if (model.dim != 2) throw InvalidArgument("n >= 3 Schwinger functions are implemented for d = 2 only");
  const double cn = model.cumulant(n);
  // The integrand decays like exp(-m sum_l |x - x_l|).
  const double L = 3.0 * spec.truncation_radius / (n * m);
  std::vector<double> lo(2), hi(2);
  for (int a = 0; a < 2; ++a) {
    lo[a] = hi[a] = points[0][a];
    for (const auto& p : points) {
      lo[a] = std::min(lo[a], p[a]);
      hi[a] = std::max(hi[a], p[a]);
    }
    lo[a] -= L;
    hi[a] += L;
  }
  const FnN g = [&](const double* x) {
    double prod = 1.0;
    for (const auto& p : points) {
      const double r = std::hypot(x[0] - p[0], x[1] - p[1]);
      // r K_1(m r) -> 1/m at the origin
      const double k = r < 1e-300 ? 1.0 / m : r * boost::math::cyl_bessel_k(1, m * r);
      prod *= k / (4.0 * kPi * m);
    }
    return cplx(prod);
  };
  const int pieces = std::max(4, static_cast<int>(std::ceil((hi[0] - lo[0]) * m / 2.0)));
  const SmearValue v = integrate_nd(g, lo, hi, spec, {pieces, pieces});
  if (spec.strict && !v.tolerance_met) throw ToleranceNotMet("Schwinger quadrature did not reach tolerance");
  return {cn * v.value.real(), std::abs(cn) * v.err_est, v.n_evals};
}

DistExpr wightman_truncated(int n, const MomentModel& model) {
  model.validate();
  if (n < 2) throw InvalidArgument("truncated Wightman functions start at n = 2");
  const double m = model.mass;
  DistExpr e;
  e.n_args = n;
  if (n == 2) {
    e.terms.push_back(DistTerm{cplx(-model.w2_normalization * model.c / std::pow(m, 4)),
                               {ShellFactor::delta_prime(Sign::Minus, m), ShellFactor::smooth(m)},
                               {1, 1}});
    return e;
  }
  const double coeff = (n % 2 ? -1.0 : 1.0) * model.c_tilde(n);
  for (int j = 0; j < n; ++j) {
    DistTerm t;
    t.coeff = coeff;
    for (int l = 0; l < n; ++l) {
      if (l < j) t.factors.push_back(ShellFactor::delta_prime(Sign::Minus, m));
      else if (l == j) t.factors.push_back(ShellFactor::fp(m));
      else t.factors.push_back(ShellFactor::delta_prime(Sign::Plus, m));
    }
    t.conservation.assign(n, 1);
    e.terms.push_back(std::move(t));
  }
  return e;
}

AssemblyReport assemble_moments(int n, const TruncatedEvaluator& truncated, const MomentModel& model) {
  AssemblyReport rep;
  const auto parts = set_partitions(n);
  rep.partitions_total = static_cast<int>(parts.size());
  for (const Partition& p : parts) {
    SmearValue prod;
    prod.value = 1.0;
    bool zero = false;
    for (const Block& b : p) {
      SmearValue bv;
      if (b.size() == 1) bv.value = model.one_point;
      else bv = truncated(b);
      if (bv.value == cplx(0.0) && bv.err_est == 0.0) zero = true;
      prod = product(prod, bv);
      if (zero) break;
    }
    if (zero) prod = SmearValue{};
    else ++rep.partitions_contributing;
    rep.per_partition.push_back(prod);
    rep.value += prod;
  }
  return rep;
}

AssemblyReport assemble_wightman_moments(int n, const MomentModel& model, const std::vector<WavePacket>& packets,
                                         const QuadSpec& spec, const SmearOptions& opts) {
  if (static_cast<int>(packets.size()) != n) throw DimensionMismatch("number of packets differs from n");
  const TruncatedEvaluator ev = [&](const Block& b) {
    std::vector<WavePacket> sub;
    for (int i : b) sub.push_back(packets[i]);
    return smear(wightman_truncated(static_cast<int>(b.size()), model), sub, spec, opts);
  };
  return assemble_moments(n, ev, model);
}

}  // namespace dipole
