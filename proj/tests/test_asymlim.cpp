#include <doctest.h>

#include <cmath>

#include "dipole/serialize.hpp"

using namespace dipole;

namespace {

const QuadSpec spec;

}  // namespace

TEST_CASE("target table") {
  for (int power : {1, 2}) {
    const auto kind = power == 1 ? FactorKind::Delta : FactorKind::DeltaPrime;
    const LimitTarget loc = LimitTarget::make(power, Channel::Loc, 1.0);
    REQUIRE(loc.target_expr.terms.size() == 1);
    CHECK(loc.target_expr.terms[0].factors[0].kind == (power == 1 ? FactorKind::PVPow1 : FactorKind::FPPow2));
    for (Channel c : {Channel::In, Channel::Out}) {
      const LimitTarget t = LimitTarget::make(power, c, 1.0);
      REQUIRE(t.target_expr.terms.size() == 2);
      for (const auto& term : t.target_expr.terms) CHECK(term.factors[0].kind == kind);
    }
  }
  // power 2, out: -i pi (delta'+ - delta'-)
  const LimitTarget out2 = LimitTarget::make(2, Channel::Out, 1.0);
  for (const auto& term : out2.target_expr.terms) {
    const double s = sign_value(term.factors[0].sign);
    CHECK(std::abs(term.coeff - cplx(0, -kPi * s)) < 1e-15);
  }
}

TEST_CASE("loc channel is t-independent and sits on its target") {
  const WavePacket p = WavePacket::gaussian_diag({1.2, 0.4}, {0.4, 0.4});
  for (int power : {1, 2}) {
    const cplx v0 = finite_t_value(power, Channel::Loc, 5.0, p, spec).value;
    for (double t : {10.0, 40.0}) CHECK(finite_t_value(power, Channel::Loc, t, p, spec).value == v0);
    TGrid grid;
    const LimitReport r = limit_and_compare(LimitTarget::make(power, Channel::Loc, 1.0), grid, p, spec);
    for (size_t i = 0; i < r.t.size(); ++i) CHECK(r.deviations[i] <= r.err_est[i] + r.target_err);
    CHECK(r.pass);
  }
}

TEST_CASE("in and out coincide at t = 0") {
  // symmetric under k0 -> -k0
  const WavePacket p = WavePacket::gaussian_diag({0.0, 0.4}, {0.6, 0.4});
  for (int power : {1, 2}) {
    const SmearValue in = finite_t_value(power, Channel::In, 0.0, p, spec);
    const SmearValue out = finite_t_value(power, Channel::Out, 0.0, p, spec);
    CHECK(std::isfinite(std::abs(in.value)));
    CHECK(std::abs(in.value - out.value) <= in.err_est + out.err_est + 1e-14);
  }
}

TEST_CASE("conjugation symmetry for a real-symmetric packet") {
  // f(-k) = conj f(k)
  const WavePacket p = WavePacket::gaussian_diag({0.0, 0.0}, {1.0, 1.0});
  for (int power : {1, 2}) {
    const SmearValue tin = smear(LimitTarget::make(power, Channel::In, 1.0).target_expr, {p}, spec);
    const SmearValue tout = smear(LimitTarget::make(power, Channel::Out, 1.0).target_expr, {p}, spec);
    CHECK(std::abs(tin.value - std::conj(tout.value)) <= 1e-8 * std::abs(tin.value));
  }
  TGrid grid;
  grid.values = {10.0, 20.0};
  const LimitReport in = limit_and_compare(LimitTarget::make(1, Channel::In, 1.0), grid, p, spec);
  const LimitReport out = limit_and_compare(LimitTarget::make(1, Channel::Out, 1.0), grid, p, spec);
  for (size_t i = 0; i < grid.values.size(); ++i)
    CHECK(std::abs(in.deviations[i] - out.deviations[i]) <= 1e-6 * out.deviations[i]);
}

TEST_CASE("power-one sign is fixed by the m^2 derivative") {
  // finite-t values approach +i pi (delta+ - delta-) for out, which is the
  // negative of the table obtained by copying the power-2 signs; the report
  // exposes the fitted constant against that copied table
  const WavePacket p = WavePacket::gaussian_diag({1.2, 0.4}, {0.4, 0.4});
  TGrid grid;
  const LimitReport r = limit_and_compare(LimitTarget::make(1, Channel::Out, 1.0), grid, p, spec);
  CHECK(r.analogy_constant.real() == doctest::Approx(-1.0).epsilon(0.1));
  CHECK(std::abs(r.analogy_constant.imag()) < 0.1);
}

// Documented red outcome: at eps = m^2/2 the deviation at t = 40 is about
// 0.2 relative for this packet (see README, criterion 4).
TEST_CASE("power one, out channel, t = 40" * doctest::may_fail()) {
  const WavePacket p = WavePacket::gaussian_diag({1.2, 0.4}, {0.4, 0.4});
  const SmearValue v = finite_t_value(1, Channel::Out, 40.0, p, spec);
  const SmearValue target = smear(LimitTarget::make(1, Channel::Out, 1.0).target_expr, {p}, spec);
  MESSAGE("relative deviation " << std::abs(v.value - target.value) / std::abs(target.value));
  CHECK(std::abs(v.value - target.value) <= 1e-2 * std::abs(target.value));
}

TEST_CASE("grid validation and strict mode") {
  TGrid g;
  g.values = {5, 5, 10};
  CHECK_THROWS_AS(g.validate(), InvalidArgument);
  g.values = {};
  CHECK_THROWS_AS(g.validate(), InvalidArgument);

  const WavePacket p = WavePacket::gaussian_diag({1.2, 0.4}, {0.4, 0.4});
  TGrid grid;
  grid.values = {5, 10, 20, 40};
  LimitOptions strict;
  strict.strict = true;
  // the power-2 in-channel deviations are not monotone on this grid
  CHECK_THROWS_AS(limit_and_compare(LimitTarget::make(2, Channel::In, 1.0), grid, p, spec, strict), NonDecaying);
  const LimitReport r = limit_and_compare(LimitTarget::make(2, Channel::In, 1.0), grid, p, spec);
  CHECK(r.non_decaying);
  CHECK_FALSE(r.pass);
}
