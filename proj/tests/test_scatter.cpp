#include <doctest.h>

#include <cmath>

#include "dipole/serialize.hpp"

using namespace dipole;

namespace {

const QuadSpec spec;

MomentModel cubic_model() {
  MomentModel m;
  m.cumulants[3] = 1.0;
  return m;
}

std::vector<WavePacket> wightman3_packets() {
  return {WavePacket::gaussian_diag({-1.2, 0.5}, {0.3, 0.3}), WavePacket::gaussian_diag({0.0, 0.0}, {0.5, 0.5}),
          WavePacket::gaussian_diag({1.1, -0.4}, {0.3, 0.3})};
}

std::vector<WavePacket> scattering3_packets() {
  return {WavePacket::gaussian_diag({1.2, 0.5}, {0.3, 0.3}), WavePacket::gaussian_diag({1.1, 0.2}, {0.3, 0.3}),
          WavePacket::gaussian_diag({1.1, -0.4}, {0.3, 0.3})};
}

ChannelAssignment assign(std::vector<Channel> c, std::vector<double> t = {}) { return ChannelAssignment{c, t}; }

}  // namespace

TEST_CASE("loc channels reproduce the plain Wightman smear") {
  const MomentModel m = cubic_model();
  const auto packets = wightman3_packets();
  const cplx plain = smear(wightman_truncated(3, m), packets, spec).value;
  const std::vector<Channel> loc(3, Channel::Loc);
  for (double t : {0.0, 7.0, 40.0})
    CHECK(finite_time_wightman(3, assign(loc, {t, t, t}), m, packets, spec).value == plain);
  const FormFactorReport ff = form_factor(3, assign(loc), m, packets, spec);
  CHECK(std::abs(ff.value.value - plain) <= 1e-9 * std::abs(plain));
  CHECK_FALSE(ff.regularization.has_value());
}

TEST_CASE("two-point form factor is the Wightman function") {
  const MomentModel m = cubic_model();
  const std::vector<WavePacket> p{WavePacket::gaussian_diag({-1.2, 0.3}, {0.4, 0.4}),
                                  WavePacket::gaussian_diag({1.1, -0.2}, {0.5, 0.3})};
  const cplx w = smear(wightman_truncated(2, m), p, spec).value;
  for (Channel a : {Channel::In, Channel::Loc, Channel::Out})
    for (Channel b : {Channel::In, Channel::Loc, Channel::Out})
      CHECK(std::abs(form_factor(2, assign({a, b}), m, p, spec).value.value - w) <= 1e-12 * std::abs(w));
}

TEST_CASE("form factor expression") {
  const MomentModel m = cubic_model();
  const DistExpr loc = form_factor_expr(3, {Channel::Loc, Channel::Loc, Channel::Loc}, m);
  const DistExpr w3 = wightman_truncated(3, m);
  REQUIRE(loc.terms.size() == w3.terms.size());
  for (size_t j = 0; j < w3.terms.size(); ++j) {
    CHECK(loc.terms[j].coeff == w3.terms[j].coeff);
    for (int l = 0; l < 3; ++l) CHECK(loc.terms[j].factors[l].kind == w3.terms[j].factors[l].kind);
  }
  // an out channel on the FP variable turns it into shell factors only
  const DistExpr mixed = form_factor_expr(3, {Channel::In, Channel::Loc, Channel::Out}, m);
  for (const auto& t : mixed.terms)
    if (t.factors[2].kind != FactorKind::FPPow2) CHECK(t.factors[2].is_shell());
}

TEST_CASE("t = 0 values and the non-dipole control") {
  const MomentModel m = cubic_model();
  const auto packets = wightman3_packets();
  const auto a = assign({Channel::In, Channel::Loc, Channel::Out}, {0, 0, 0});
  const SmearValue d = finite_time_wightman(3, a, m, packets, spec, MultKind::ChiDT);
  const SmearValue t = finite_time_wightman(3, a, m, packets, spec, MultKind::ChiT);
  CHECK(std::isfinite(std::abs(d.value)));
  CHECK(d.value == t.value);
}

TEST_CASE("relabelling two minus-shell arguments inside one term") {
  const MomentModel m = cubic_model();
  const DistExpr w3 = wightman_truncated(3, m);
  const WavePacket p0 = WavePacket::gaussian_diag({-1.2, 0.5}, {0.3, 0.3});
  const WavePacket p1 = WavePacket::gaussian_diag({-1.3, -0.3}, {0.3, 0.4});
  const WavePacket p2 = WavePacket::gaussian_diag({2.5, -0.2}, {0.4, 0.4});
  const cplx a = smear_term(w3.terms[2], {p0, p1, p2}, spec).value;
  const cplx b = smear_term(w3.terms[2], {p1, p0, p2}, spec).value;
  CHECK(std::abs(a) > 0);
  CHECK(std::abs(a - b) <= 1e-10 * std::abs(a));
}

TEST_CASE("S-matrix closed form") {
  const MomentModel m = cubic_model();
  const DistExpr e = smatrix_expr(3, 1, m);
  REQUIRE(e.terms.size() == 1);
  CHECK(e.terms[0].coeff == cplx(0, 2 * kPi * m.c_tilde(3)));
  CHECK(e.terms[0].conservation == std::vector<int>{1, -1, -1});
  for (const auto& f : e.terms[0].factors) {
    CHECK(f.kind == FactorKind::DeltaPrime);
    CHECK(f.sign == Sign::Plus);
  }

  const auto packets = scattering3_packets();
  const RegReport r = smatrix_truncated(3, 1, m, packets, spec);
  CHECK(r.converged);
  REQUIRE(r.levels.size() == 4);
  for (int i = 1; i < 4; ++i) CHECK(r.sigmas[i] == doctest::Approx(r.sigmas[i - 1] / 2));
  MomentModel m10 = m;
  m10.cumulants[3] = 10.0;
  const RegReport r10 = smatrix_truncated(3, 1, m10, packets, spec);
  CHECK(std::abs(r10.value.value - 10.0 * r.value.value) <= 1e-12 * std::max(std::abs(r10.value.value), 1e-300));

  std::vector<WavePacket> neg;
  for (const auto& p : packets) neg.push_back(WavePacket::gaussian_diag({-p.center()[0], p.center()[1]}, {0.3, 0.3}));
  const RegReport rn = smatrix_truncated(3, 1, m, neg, spec);
  CHECK(std::abs(rn.value.value) <= std::max(rn.value.err_est, 1e-300));

  CHECK_THROWS_AS(smatrix_expr(3, 0, m), InvalidArgument);
  CHECK_THROWS_AS(smatrix_expr(3, 3, m), InvalidArgument);
}

TEST_CASE("regularization spec") {
  RegSpec bad;
  bad.levels = 1;
  CHECK_THROWS_AS(bad.validate(), InvalidArgument);
  bad = RegSpec{};
  bad.sigma0 = 0;
  CHECK_THROWS_AS(bad.validate(), InvalidArgument);
}

TEST_CASE("divergence demonstration") {
  const MomentModel m = cubic_model();
  const auto packets = wightman3_packets();
  TGrid grid;
  grid.values = {10, 20, 40, 80};
  const std::vector<Channel> ch{Channel::In, Channel::Loc, Channel::Out};
  const DivergenceReport hr = divergence_demo(3, m, packets, ch, grid, MultKind::HaagRuelleOnly, spec);
  CHECK(hr.slope >= 0.8);
  CHECK(hr.growing);
  // one factor of t per non-dipole argument: two of them grow like t^2
  CHECK(hr.slope == doctest::Approx(2.0).epsilon(0.05));
  const std::vector<Channel> one{Channel::Loc, Channel::Loc, Channel::Out};
  const DivergenceReport lin = divergence_demo(3, m, packets, one, grid, MultKind::ChiT, spec);
  const double ratio = std::abs(lin.values[2].value) / std::abs(lin.values[1].value);
  CHECK(ratio >= 1.6);
  CHECK(ratio <= 2.4);
  const DivergenceReport d = divergence_demo(3, m, packets, ch, grid, MultKind::ChiDT, spec);
  CHECK(d.max_over_min <= 1.2);
  CHECK(d.bounded);
}

TEST_CASE("two-point equation of motion") {
  const DistExpr w2 = wightman_truncated(2, MomentModel{});
  const WavePacket f = WavePacket::gaussian_diag({-1.2, 0.3}, {0.4, 0.4});
  const WavePacket g = WavePacket::gaussian_diag({1.1, -0.2}, {0.5, 0.3});
  const Poly sh = Poly::shell(2, 1.0);
  const SmearValue second = smear(apply_multiplier(w2, 0, Multiplier::smooth_poly(sh * sh)), {f, g}, spec);
  CHECK(std::abs(second.value) <= std::max(second.err_est, 1e-14));
  const SmearValue first = smear(apply_multiplier(w2, 0, Multiplier::smooth_poly(sh)), {f, g}, spec);
  CHECK(std::abs(first.value) > 100 * first.err_est);
}

TEST_CASE("channel assignment validation") {
  ChannelAssignment a{{Channel::In, Channel::Out}, {}};
  CHECK_NOTHROW(a.validate(2));
  CHECK_THROWS(a.validate(3));
  a.times = {1.0, -1.0};
  CHECK_THROWS_AS(a.validate(2), InvalidArgument);
}
