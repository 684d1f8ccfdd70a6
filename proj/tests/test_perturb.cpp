#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "dipole/serialize.hpp"

using namespace dipole;

namespace {

const QuadSpec spec;
using Pts = std::vector<std::vector<double>>;

double G(const std::vector<double>& a, const std::vector<double>& b) {
  return std::cyl_bessel_k(0.0, std::hypot(a[0] - b[0], a[1] - b[1])) / (2 * kPi);
}

// Mixed derivative d^n / df_1 ... df_n at f = 0 of
// exp(1/2 sum_{j != l} f_j f_l G_jl + alpha sum_j f_j G(x_j - x)),
// by the 2^n-point central stencil with one Richardson step in h.
double generating_functional_oracle(const Pts& pts, const std::vector<double>& x, double alpha) {
  const int n = static_cast<int>(pts.size());
  auto Z = [&](const std::vector<double>& f) {
    double e = 0;
    for (int j = 0; j < n; ++j) {
      e += alpha * f[j] * G(pts[j], x);
      for (int l = 0; l < n; ++l)
        if (l != j) e += 0.5 * f[j] * f[l] * G(pts[j], pts[l]);
    }
    return std::exp(e);
  };
  auto stencil = [&](double h) {
    double acc = 0;
    for (int mask = 0; mask < (1 << n); ++mask) {
      std::vector<double> f(n);
      double sgn = 1;
      for (int j = 0; j < n; ++j) {
        const bool plus = mask >> j & 1;
        f[j] = plus ? h : -h;
        if (!plus) sgn = -sgn;
      }
      acc += sgn * Z(f);
    }
    return acc / std::pow(2 * h, n);
  };
  const double h = 2e-2;
  return (4 * stencil(h / 2) - stencil(h)) / 3;
}

void all_pairings(std::vector<int> el, Partition cur, std::set<Partition>& out) {
  if (el.empty()) {
    std::sort(cur.begin(), cur.end());
    out.insert(cur);
    return;
  }
  const int first = el[0];
  for (size_t i = 1; i < el.size(); ++i) {
    std::vector<int> rest;
    for (size_t j = 1; j < el.size(); ++j)
      if (j != i) rest.push_back(el[j]);
    Partition next = cur;
    next.push_back({first, el[i]});
    all_pairings(rest, next, out);
  }
}

std::vector<WavePacket> scattering3_packets() {
  return {WavePacket::gaussian_diag({1.2, 0.5}, {0.3, 0.3}), WavePacket::gaussian_diag({1.1, 0.2}, {0.3, 0.3}),
          WavePacket::gaussian_diag({1.1, -0.4}, {0.3, 0.3})};
}

}  // namespace

TEST_CASE("coupling measures") {
  const CouplingMeasure sg = CouplingMeasure::sinh_gordon();
  CHECK_NOTHROW(sg.validate());
  CHECK(sg.symmetric());
  for (int q = 1; q <= 7; q += 2) CHECK(sg.moment(q) == cplx(0.0));
  CHECK(sg.moment(2) == cplx(1.0));
  CHECK(sg.moment(0) == cplx(1.0));

  CouplingMeasure trig = sg;
  trig.trigonometric = true;
  CHECK(std::abs(trig.moment(2) + 1.0) < 1e-15);
  CHECK(std::abs(trig.moment(4) - 1.0) < 1e-15);

  CouplingMeasure skew{{{1.0, 0.25}, {-0.5, 0.75}}, false};
  CHECK_FALSE(skew.symmetric());
  CHECK(skew.moment(3).real() == doctest::Approx(0.25 - 0.75 * 0.125));
  skew.trigonometric = true;
  CHECK(std::abs(skew.moment(3) - cplx(0, -1) * (0.25 - 0.75 * 0.125)) < 1e-15);

  CHECK_THROWS_AS((CouplingMeasure{{{3.6, 1.0}}, false}.validate()), InvalidArgument);
  CHECK_THROWS_AS((CouplingMeasure{{{1.0, 0.5}}, false}.validate()), InvalidArgument);
  CHECK_THROWS_AS((CouplingMeasure{{{1.0, 1.5}, {0.5, -0.5}}, false}.validate()), InvalidArgument);
}

TEST_CASE("subset and pair-partition enumeration") {
  for (int n = 0; n <= 6; ++n) {
    std::set<std::pair<std::vector<int>, Partition>> brute;
    for (int mask = 0; mask < (1 << n); ++mask) {
      std::vector<int> s, c;
      for (int j = 0; j < n; ++j) (mask >> j & 1 ? s : c).push_back(j);
      std::set<Partition> pairings;
      all_pairings(c, {}, pairings);
      for (const auto& p : pairings) brute.insert({s, p});
    }
    const auto got = subset_pairings(n);
    std::set<std::pair<std::vector<int>, Partition>> mine;
    for (const auto& sp : got) {
      Partition p = sp.pairing;
      for (auto& b : p) std::sort(b.begin(), b.end());
      std::sort(p.begin(), p.end());
      mine.insert({sp.subset, p});
    }
    CHECK(got.size() == brute.size());
    CHECK(mine == brute);
    for (size_t i = 1; i < got.size(); ++i) {
      const auto& a = got[i - 1].subset;
      const auto& b = got[i].subset;
      CHECK((a.size() < b.size() || (a.size() == b.size() && a <= b)));
    }
  }
}

TEST_CASE("Wick exponential correlations") {
  const MomentModel m;
  const std::vector<double> x{0.3, 0.4};
  const Pts two{{0.0, 0.0}, {1.0, 0.0}};

  CHECK(wick_exp_correlation(two, x, 0.0, m) == doctest::Approx(G(two[0], two[1])).epsilon(1e-13));
  CHECK(wick_exp_correlation({{1.0, 0.0}}, x, 0.7, m) == doctest::Approx(0.7 * G({1.0, 0.0}, x)).epsilon(1e-13));
  CHECK(wick_exp_correlation(two, x, 1.0, m) ==
        doctest::Approx(G(two[0], two[1]) + G(two[0], x) * G(two[1], x)).epsilon(1e-13));
  CHECK(free_kernel(two[0], two[1], 1.0) == doctest::Approx(G(two[0], two[1])).epsilon(1e-13));

  const std::vector<Pts> configs{two, {{0.0, 0.0}, {1.0, 0.2}, {-0.4, 0.9}}, {{0.5, -0.5}}};
  for (const auto& pts : configs)
    for (double alpha : {0.0, 0.8, -1.3}) {
      const double v = wick_exp_correlation(pts, x, alpha, m);
      const double oracle = generating_functional_oracle(pts, x, alpha);
      CHECK(std::abs(v - oracle) <= 1e-4 * std::max(std::abs(v), 1e-3));
    }

  CHECK_THROWS_AS(wick_exp_correlation({{0.3, 0.4}, {1.0, 0.0}}, x, 1.0, m), CoincidentPoints);
  CHECK_THROWS_AS(wick_exp_correlation({{1.0, 0.0}, {1.0, 0.0}}, x, 1.0, m), CoincidentPoints);
}

TEST_CASE("first-order Schwinger functions") {
  const MomentModel m;
  const CouplingMeasure sg = CouplingMeasure::sinh_gordon();
  const Pts two{{0.0, 0.0}, {1.0, 0.0}};
  const Pts three{{0.0, 0.0}, {1.0, 0.0}, {0.5, 0.8}};

  const FirstOrderReport zero = first_order_schwinger(two, 0.0, sg, m, spec);
  CHECK(zero.value == cplx(zero.free_part));
  CHECK(zero.correction == cplx(0.0));
  CHECK(zero.free_part == doctest::Approx(G(two[0], two[1])).epsilon(1e-13));

  const FirstOrderReport r2 = first_order_schwinger(two, 0.5, sg, m, spec);
  CHECK(r2.volume_term_consumed);
  bool saw_pair = false;
  for (const auto& t : r2.terms) {
    CHECK_FALSE(t.subset.empty());
    if (t.subset.size() == 2) {
      saw_pair = true;
      // int G(x1 - x) G(x2 - x) dx = (-Laplace + 1)^{-2}(x1 - x2)
      CHECK(t.integral == doctest::Approx(euclid_kernel(2, {1.0, 0.0}, 1.0)).epsilon(1e-6));
      CHECK(std::abs(t.value - (-0.25 * t.integral)) < 1e-15);
    }
  }
  CHECK(saw_pair);

  const FirstOrderReport r3 = first_order_schwinger(three, 1.0, sg, m, spec);
  for (const auto& t : r3.terms)
    if (t.subset.size() % 2) CHECK(t.value == cplx(0.0));
  CHECK(r3.correction == cplx(0.0));
}

TEST_CASE("first-order Wightman terms") {
  const MomentModel m;
  CouplingMeasure rho{{{1.0, 0.25}, {-0.5, 0.75}}, false};
  const DistExpr w3 = first_order_wightman_term(3, m, rho);
  REQUIRE(w3.terms.size() == 3);
  for (int j = 0; j < 3; ++j) {
    for (int l = 0; l < 3; ++l) {
      const auto& f = w3.terms[j].factors[l];
      if (l == j) {
        CHECK(f.kind == FactorKind::PVPow1);
      } else {
        CHECK(f.kind == FactorKind::Delta);
        CHECK(f.sign == (l < j ? Sign::Minus : Sign::Plus));
      }
    }
  }
  const DistExpr w2 = first_order_wightman_term(2, m, rho, 1.0);
  REQUIRE(w2.terms.size() == 1);
  CHECK(w2.terms[0].factors[0].kind == FactorKind::DeltaPrime);
  CHECK(w2.terms[0].factors[0].sign == Sign::Minus);
  // doubling mu_2 doubles the q = 2 term
  CouplingMeasure rho2{{{std::sqrt(2.0), 0.25}, {-0.5 * std::sqrt(2.0), 0.75}}, false};
  CHECK(std::abs(first_order_wightman_term(2, m, rho2).terms[0].coeff - 2.0 * w2.terms[0].coeff) < 1e-14);

  const DistExpr sg3 = first_order_wightman_term(3, m, CouplingMeasure::sinh_gordon());
  for (const auto& t : sg3.terms) CHECK(t.coeff == cplx(0.0));
}

TEST_CASE("q = 2 constant is measured, not assumed") {
  const MomentModel m;
  for (double lambda : {0.5, 2.0}) {
    const Q2Constant c = q2_fitted_constant(lambda, CouplingMeasure::sinh_gordon(), m, {1.0, 0.3}, spec);
    CHECK(std::abs(c.constant - cplx(-lambda / 2)) <= 1e-6 * lambda + c.err_est);
  }
}

TEST_CASE("first-order S-matrix") {
  const MomentModel m;
  const auto packets = scattering3_packets();
  TGrid grid;
  const double s = std::cbrt(2.0);
  CouplingMeasure rho{{{1.0, 0.25}, {-0.5, 0.75}}, false};
  CouplingMeasure rho_x2{{{s, 0.25}, {-0.5 * s, 0.75}}, false};
  const auto a = first_order_smatrix(3, 1, m, rho, packets, grid, spec, {}, false);
  const auto b = first_order_smatrix(3, 1, m, rho_x2, packets, grid, spec, {}, false);
  CHECK(a.closed_form.converged);
  CHECK(std::abs(b.closed_form.value.value - 2.0 * a.closed_form.value.value) <=
        1e-12 * std::max(std::abs(a.closed_form.value.value), 1e-300));
  CHECK(a.q2_dipole_deviation <= 1e-12 * std::max(a.q2_scale, 1.0));

  std::vector<WavePacket> neg;
  for (const auto& p : packets) neg.push_back(WavePacket::gaussian_diag({-p.center()[0], p.center()[1]}, {0.3, 0.3}));
  const auto n = first_order_smatrix(3, 1, m, rho, neg, grid, spec, {}, false);
  CHECK(std::abs(n.closed_form.value.value) <= std::max(n.closed_form.value.err_est, 1e-300));

  const DistExpr e = first_order_smatrix_expr(3, 1, m, rho);
  REQUIRE(e.terms.size() == 1);
  for (const auto& f : e.terms[0].factors) {
    CHECK(f.kind == FactorKind::Delta);
    CHECK(f.sign == Sign::Plus);
  }
}
