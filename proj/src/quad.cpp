#include "dipole/quad.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

namespace dipole {

void QuadSpec::validate() const {
  if (!(abs_tol > 0) || !(rel_tol > 0)) throw InvalidArgument("quadrature tolerances must be positive");
  if (max_depth < 1) throw InvalidArgument("max_depth must be >= 1");
  if (truncation_radius < 6) throw InvalidArgument("truncation_radius must be >= 6");
  if (max_intervals < 1) throw InvalidArgument("max_intervals must be >= 1");
}

SmearValue& SmearValue::operator+=(const SmearValue& o) {
  value += o.value;
  err_est += o.err_est;
  n_evals += o.n_evals;
  tolerance_met = tolerance_met && o.tolerance_met;
  return *this;
}

SmearValue SmearValue::scaled(cplx s) const {
  SmearValue r = *this;
  r.value *= s;
  r.err_est *= std::abs(s);
  return r;
}

SmearValue operator+(SmearValue a, const SmearValue& b) { return a += b; }
SmearValue operator-(SmearValue a, const SmearValue& b) { return a += b.scaled(-1.0); }

SmearValue product(const SmearValue& a, const SmearValue& b) {
  SmearValue r;
  r.value = a.value * b.value;
  r.err_est = std::abs(a.value) * b.err_est + std::abs(b.value) * a.err_est + a.err_est * b.err_est;
  r.n_evals = a.n_evals + b.n_evals;
  r.tolerance_met = a.tolerance_met && b.tolerance_met;
  return r;
}

namespace {

constexpr double kXgk[11] = {0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
                             0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
                             0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
                             0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
                             0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
                             0.0};
constexpr double kWgk[11] = {0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
                             0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
                             0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
                             0.123491976262065851077208482123880, 0.134709217311473325928054001771707,
                             0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
                             0.149445554002916905664936468389821};
constexpr double kWg[5] = {0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
                           0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
                           0.295524224714752870173892994651338};

struct Piece {
  double a, b;
  cplx value;
  double err;
  int depth;
  bool operator<(const Piece& o) const { return err < o.err; }
};

Piece gk21(const Fn1& f, double a, double b, int depth) {
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  cplx fv[21];
  fv[10] = f(c);
  for (int j = 0; j < 10; ++j) {
    fv[j] = f(c - h * kXgk[j]);
    fv[20 - j] = f(c + h * kXgk[j]);
  }
  cplx resk = fv[10] * kWgk[10];
  cplx resg = 0.0;
  double resabs = std::abs(fv[10]) * kWgk[10];
  for (int j = 0; j < 10; ++j) {
    resk += (fv[j] + fv[20 - j]) * kWgk[j];
    resabs += (std::abs(fv[j]) + std::abs(fv[20 - j])) * kWgk[j];
    if (j % 2 == 1) resg += (fv[j] + fv[20 - j]) * kWg[j / 2];
  }
  const cplx mean = 0.5 * resk;
  double resasc = std::abs(fv[10] - mean) * kWgk[10];
  for (int j = 0; j < 10; ++j) resasc += (std::abs(fv[j] - mean) + std::abs(fv[20 - j] - mean)) * kWgk[j];
  const double ah = std::abs(h);
  resabs *= ah;
  resasc *= ah;
  double err = std::abs((resk - resg) * h);
  if (resasc != 0.0 && err != 0.0) err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
  const double eps = std::numeric_limits<double>::epsilon();
  if (resabs > std::numeric_limits<double>::min() / (50 * eps)) err = std::max(50 * eps * resabs, err);
  if (!std::isfinite(std::abs(resk))) err = std::numeric_limits<double>::infinity();
  return Piece{a, b, resk * h, err, depth};
}

}  // namespace

SmearValue integrate_1d(const Fn1& g, double a, double b, const QuadSpec& spec, int pieces) {
  SmearValue out;
  if (a == b) return out;
  pieces = std::max(1, pieces);
  long evals = 0;
  auto f = [&](double x) {
    ++evals;
    return g(x);
  };
  std::priority_queue<Piece> heap;
  std::vector<Piece> done;  // pieces that may not be split further
  cplx total = 0.0;
  double err = 0.0;
  for (int i = 0; i < pieces; ++i) {
    const double x0 = a + (b - a) * i / pieces, x1 = a + (b - a) * (i + 1) / pieces;
    Piece p = gk21(f, x0, x1, 0);
    total += p.value;
    err += p.err;
    heap.push(p);
  }
  bool met = true;
  while (true) {
    const double tol = std::max(spec.abs_tol, spec.rel_tol * std::abs(total));
    if (err <= tol) break;
    if (heap.empty()) {
      met = false;
      break;
    }
    if (static_cast<int>(heap.size() + done.size()) >= spec.max_intervals) {
      met = false;
      break;
    }
    Piece p = heap.top();
    heap.pop();
    if (p.depth >= spec.max_depth || std::abs(p.b - p.a) < 1e-14 * (std::abs(a) + std::abs(b) + 1e-300)) {
      done.push_back(p);
      continue;
    }
    const double m = 0.5 * (p.a + p.b);
    Piece l = gk21(f, p.a, m, p.depth + 1), r = gk21(f, m, p.b, p.depth + 1);
    total += l.value + r.value - p.value;
    err += l.err + r.err - p.err;
    heap.push(l);
    heap.push(r);
  }
  // Re-sum to avoid drift from the running updates.
  total = 0.0;
  err = 0.0;
  for (const auto& p : done) {
    total += p.value;
    err += p.err;
  }
  while (!heap.empty()) {
    total += heap.top().value;
    err += heap.top().err;
    heap.pop();
  }
  out.value = total;
  out.err_est = err;
  out.n_evals = evals;
  out.tolerance_met = met;
  if (!met && spec.strict) throw ToleranceNotMet("adaptive quadrature exhausted its subdivision budget");
  return out;
}

namespace {

SmearValue nested(const FnN& g, const std::vector<double>& lo, const std::vector<double>& hi,
                  const QuadSpec& spec, const std::vector<int>& pieces, std::vector<double>& x, size_t axis) {
  const size_t n = lo.size();
  const double len = std::abs(hi[axis] - lo[axis]);
  const int pc = pieces.empty() ? 1 : pieces[axis];
  if (axis + 1 == n) {
    return integrate_1d(
        [&](double xa) {
          x[axis] = xa;
          return g(x.data());
        },
        lo[axis], hi[axis], spec, pc);
  }
  QuadSpec inner = spec;
  inner.abs_tol = spec.abs_tol / (4.0 * std::max(len, 1e-300));
  inner.rel_tol = spec.rel_tol / 4.0;
  double worst_inner = 0.0;
  long inner_evals = 0;
  bool inner_met = true;
  SmearValue outer = integrate_1d(
      [&](double xa) {
        x[axis] = xa;
        SmearValue v = nested(g, lo, hi, inner, pieces, x, axis + 1);
        worst_inner = std::max(worst_inner, v.err_est);
        inner_evals += v.n_evals;
        inner_met = inner_met && v.tolerance_met;
        return v.value;
      },
      lo[axis], hi[axis], spec, pc);
  outer.err_est += worst_inner * len;
  outer.n_evals = inner_evals;
  outer.tolerance_met = outer.tolerance_met && inner_met;
  return outer;
}

}  // namespace

SmearValue integrate_nd(const FnN& g, const std::vector<double>& lo, const std::vector<double>& hi,
                        const QuadSpec& spec, const std::vector<int>& pieces) {
  spec.validate();
  if (lo.size() != hi.size() || lo.empty()) throw DimensionMismatch("integration box bounds");
  if (lo.size() > 4) throw InvalidArgument("integration dimension above 4");
  if (!pieces.empty() && pieces.size() != lo.size()) throw DimensionMismatch("pieces per axis");
  std::vector<double> x(lo.size());
  QuadSpec s = spec;
  s.strict = false;
  SmearValue v = nested(g, lo, hi, s, pieces, x, 0);
  if (!v.tolerance_met && spec.strict) throw ToleranceNotMet("tensorized quadrature did not reach tolerance");
  return v;
}

SmearValue pv_simple(const Fn1& g, double u0, double lo, double hi, const QuadSpec& spec) {
  spec.validate();
  if (!(lo < hi)) throw InvalidArgument("pv_simple needs lo < hi");
  const double guard = 1e-6;
  if (std::abs(u0 - lo) < guard || std::abs(u0 - hi) < guard)
    throw PoleAtBoundary("pole lies within 1e-6 of the truncation boundary");
  if (u0 < lo || u0 > hi)
    return integrate_1d([&](double u) { return g(u) / (u - u0); }, lo, hi, spec);
  const double w = std::min(u0 - lo, hi - u0);
  SmearValue sym = integrate_1d([&](double v) { return (g(u0 + v) - g(u0 - v)) / v; }, 0.0, w, spec);
  if (u0 - w > lo) sym += integrate_1d([&](double u) { return g(u) / (u - u0); }, lo, u0 - w, spec);
  if (u0 + w < hi) sym += integrate_1d([&](double u) { return g(u) / (u - u0); }, u0 + w, hi, spec);
  return sym;
}

FinitePartReport fp_double_report(const Fn1& g, double u0, double lo, double hi, const QuadSpec& spec) {
  spec.validate();
  if (!(lo < hi)) throw InvalidArgument("fp_double needs lo < hi");
  const double guard = 1e-6;
  if (std::abs(u0 - lo) < guard || std::abs(u0 - hi) < guard)
    throw PoleAtBoundary("pole lies within 1e-6 of the truncation boundary");
  FinitePartReport rep;
  if (u0 < lo || u0 > hi) {
    rep.taylor = integrate_1d([&](double u) { return g(u) / ((u - u0) * (u - u0)); }, lo, hi, spec);
    rep.pole_deriv = rep.taylor;
    rep.result = rep.taylor;
    return rep;
  }
  const double w = std::min(u0 - lo, hi - u0);
  const cplx g0 = g(u0);
  // Below v_c the second difference is dominated by rounding; it is frozen
  // at its value at v_c.
  const double vc = 1e-4 * w;
  auto second = [&](double v) { return (g(u0 + v) + g(u0 - v) - 2.0 * g0) / (v * v); };
  const cplx qc = second(vc);
  SmearValue a = integrate_1d([&](double v) { return v < vc ? qc : second(v); }, 0.0, w, spec, 2);
  a.value -= 2.0 * g0 / w;
  a.err_est += 1e-16 * std::abs(g0) / vc * 4.0;
  if (u0 - w > lo) a += integrate_1d([&](double u) { return g(u) / ((u - u0) * (u - u0)); }, lo, u0 - w, spec);
  if (u0 + w < hi) a += integrate_1d([&](double u) { return g(u) / ((u - u0) * (u - u0)); }, u0 + w, hi, spec);
  rep.taylor = a;

  // d/du0 PV int g/(u-u0) = FP int g/(u-u0)^2; three step sizes, Richardson.
  QuadSpec tight = spec;
  tight.abs_tol = spec.abs_tol * 1e-3;
  tight.rel_tol = std::max(spec.rel_tol * 1e-3, 1e-14);
  const double h = 0.02 * w;
  auto cd = [&](double step, double& err, long& evals) {
    SmearValue p = pv_simple(g, u0 + step, lo, hi, tight);
    SmearValue m = pv_simple(g, u0 - step, lo, hi, tight);
    err = (p.err_est + m.err_est) / (2 * step);
    evals += p.n_evals + m.n_evals;
    return (p.value - m.value) / (2 * step);
  };
  double e1, e2, e3;
  long evals = 0;
  const cplx d1 = cd(h, e1, evals), d2 = cd(2 * h, e2, evals), d3 = cd(4 * h, e3, evals);
  const cplx r12 = (4.0 * d1 - d2) / 3.0, r23 = (4.0 * d2 - d3) / 3.0;
  SmearValue b;
  b.value = (16.0 * r12 - r23) / 15.0;
  b.err_est = std::abs(r12 - r23) / 15.0 + 2 * (e1 + e2 + e3);
  b.n_evals = evals;
  rep.pole_deriv = b;

  const double diff = std::abs(a.value - b.value);
  if (diff > 100.0 * (a.err_est + b.err_est))
    throw InconsistentFinitePart("finite-part methods disagree beyond 100x their error estimates");
  rep.result = a;
  rep.result.err_est += diff;
  rep.result.n_evals += b.n_evals;
  return rep;
}

SmearValue fp_double(const Fn1& g, double u0, double lo, double hi, const QuadSpec& spec) {
  return fp_double_report(g, u0, lo, hi, spec).result;
}

int oscillation_pieces(double phase_span) {
  if (!(phase_span > 0)) return 1;
  return 1 + static_cast<int>(std::ceil(phase_span / kPi));
}

SmearValue oscillatory_integrate(const FnN& g, const std::function<double(const double*)>& theta, double t,
                                 const std::vector<double>& lo, const std::vector<double>& hi,
                                 const QuadSpec& spec) {
  const size_t n = lo.size();
  std::vector<int> pieces(n, 1);
  if (t != 0.0) {
    // coarse gradient scan
    const int m = 9;
    std::vector<double> maxgrad(n, 0.0), x(n), xp(n);
    std::vector<int> idx(n, 0);
    long total = 1;
    for (size_t a = 0; a < n; ++a) total *= m;
    for (long c = 0; c < total; ++c) {
      long r = c;
      for (size_t a = 0; a < n; ++a) {
        idx[a] = r % m;
        r /= m;
        x[a] = lo[a] + (hi[a] - lo[a]) * (idx[a] + 0.5) / m;
      }
      for (size_t a = 0; a < n; ++a) {
        const double h = 1e-6 * std::max(1.0, std::abs(hi[a] - lo[a]));
        xp = x;
        xp[a] += h;
        const double th1 = theta(xp.data());
        xp[a] -= 2 * h;
        const double th0 = theta(xp.data());
        maxgrad[a] = std::max(maxgrad[a], std::abs(th1 - th0) / (2 * h));
      }
    }
    for (size_t a = 0; a < n; ++a) pieces[a] = oscillation_pieces(std::abs(t) * maxgrad[a] * std::abs(hi[a] - lo[a]));
  }
  return integrate_nd(
      [&](const double* k) { return g(k) * std::exp(cplx(0.0, t * theta(k))); }, lo, hi, spec, pieces);
}

}  // namespace dipole
