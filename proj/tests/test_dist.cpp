#include <doctest.h>

#include <cmath>

#include "dipole/serialize.hpp"

using namespace dipole;

namespace {

const QuadSpec spec;

double rel(cplx a, cplx b) { return std::abs(a - b) / std::abs(b); }

// Positive-energy shell smear with delta(s) replaced by the Breit-Wigner
// profile (eps/pi)/(s^2 + eps^2) on a dense (k0, k1) trapezoidal grid,
// followed by Richardson in eps (first and second order).
double breit_wigner_oracle(const WavePacket& p) {
  auto level = [&](double eps) {
    const double h1 = 0.05, h0 = eps / 8;
    double acc = 0;
    for (double k1 = p.center()[1] - 9; k1 <= p.center()[1] + 9; k1 += h1) {
      const double w2 = 1 + k1 * k1;
      for (double k0 = h0 / 2; k0 <= p.center()[0] + 9; k0 += h0) {
        const double s = k0 * k0 - w2;
        acc += p.eval({k0, k1}).real() * eps / kPi / (s * s + eps * eps);
      }
    }
    return acc * h0 * h1;
  };
  const double e = 0.02;
  const double a = level(e), b = level(e / 2), c = level(e / 4);
  const double r1 = 2 * b - a, r2 = 2 * c - b;
  return (4 * r2 - r1) / 3;
}

std::vector<WavePacket> suite_packets(std::uint64_t seed, int count, int dim, Sign s = Sign::None) {
  Lcg rng(seed);
  std::vector<WavePacket> out;
  for (int i = 0; i < count; ++i) out.push_back(random_packet(rng, dim, s));
  return out;
}

}  // namespace

TEST_CASE("positive shell delta against a Breit-Wigner grid oracle") {
  const WavePacket p = WavePacket::gaussian_diag({std::sqrt(2.0), 1.0}, {1, 1});
  const SmearValue v = smear(single_factor(ShellFactor::delta(Sign::Plus, 1.0)), {p}, spec);
  CHECK(std::abs(v.value.imag()) < 1e-14);
  CHECK(std::abs(v.value.real() - breit_wigner_oracle(p)) / std::abs(v.value.real()) < 1e-5);
}

TEST_CASE("energy support of signed shell factors") {
  const WavePacket pos = WavePacket::gaussian_diag({3.0, 0.2}, {0.2, 0.2});
  for (auto f : {ShellFactor::delta_prime(Sign::Minus, 1.0), ShellFactor::delta(Sign::Minus, 1.0)}) {
    const SmearValue v = smear(single_factor(f), {pos}, spec);
    CHECK(std::abs(v.value) <= std::max(v.err_est, 1e-300));
  }
  const WavePacket neg = WavePacket::gaussian_diag({-3.0, 0.2}, {0.2, 0.2});
  const SmearValue v = smear(single_factor(ShellFactor::delta_prime(Sign::Plus, 1.0)), {neg}, spec);
  CHECK(std::abs(v.value) <= std::max(v.err_est, 1e-300));
}

TEST_CASE("shell identities on random packets") {
  SUBCASE("(k^2 - m^2) delta' = -delta") {
    for (int dim : {2, 3}) {
      for (const auto& p : suite_packets(31 + dim, 10, dim)) {
        for (Sign s : {Sign::Plus, Sign::Minus}) {
          ShellFactor f = ShellFactor::delta_prime(s, 1.0);
          f.multiplier = Multiplier::smooth_poly(Poly::shell(dim, 1.0));
          const cplx lhs = smear(single_factor(f), {p}, spec).value;
          const cplx d = smear(single_factor(ShellFactor::delta(s, 1.0)), {p}, spec).value;
          CHECK(std::abs(lhs + d) / std::abs(d) < 1e-8);
        }
      }
    }
  }
  SUBCASE("delta' = -d/d(m^2) delta") {
    const double h = 1e-4;
    int i = 0;
    for (const auto& p : suite_packets(41, 20, 2)) {
      const Sign s = (i++ % 2) ? Sign::Minus : Sign::Plus;
      const cplx dp = smear(single_factor(ShellFactor::delta_prime(s, 1.0)), {p}, spec).value;
      const cplx up = smear(single_factor(ShellFactor::delta(s, std::sqrt(1 + h))), {p}, spec).value;
      const cplx dn = smear(single_factor(ShellFactor::delta(s, std::sqrt(1 - h))), {p}, spec).value;
      CHECK(std::abs(dp + (up - dn) / (2 * h)) < 1e-5);
    }
  }
}

TEST_CASE("multipliers attached to single factors") {
  const WavePacket p = WavePacket::gaussian_diag({1.3, 0.2}, {0.4, 0.5});
  SUBCASE("identity multiplier") {
    const DistExpr e = single_factor(ShellFactor::delta_prime(Sign::Plus, 1.0));
    const DistExpr one = apply_multiplier(e, 0, Multiplier::smooth_poly(Poly::constant(2, 1.0)));
    CHECK(std::abs(smear(one, {p}, spec).value - smear(e, {p}, spec).value) < 1e-12);
  }
  SUBCASE("squared shell polynomial cancels the double pole") {
    const Poly sh = Poly::shell(2, 1.0);
    const DistExpr e = apply_multiplier(single_factor(ShellFactor::fp(1.0)), 0, Multiplier::smooth_poly(sh * sh));
    const WavePacket& pk = p;
    const auto [lo0, hi0] = packet_window(pk, 0, spec);
    const auto [lo1, hi1] = packet_window(pk, 1, spec);
    const SmearValue plain =
        integrate_nd([&](const double* k) { return pk.eval({k[0], k[1]}); }, {lo0, lo1}, {hi0, hi1}, spec);
    CHECK(rel(smear(e, {p}, spec).value, plain.value) < 1e-8);
  }
  SUBCASE("chi^d_t on a shell delta is t-independent") {
    const cplx base = smear(single_factor(ShellFactor::delta(Sign::Plus, 1.0)), {p}, spec).value;
    for (double t : {3.0, 17.0}) {
      const DistExpr e = apply_multiplier(single_factor(ShellFactor::delta(Sign::Plus, 1.0)), 0,
                                          Multiplier::chi_d_t(Channel::Out, t, 1.0, Cutoff::standard(1.0)));
      CHECK(rel(smear(e, {p}, spec).value, base) < 1e-9);
    }
  }
}

TEST_CASE("tensor products factorize") {
  const WavePacket f = WavePacket::gaussian_diag({1.2, 0.3}, {0.4, 0.4});
  const WavePacket g = WavePacket::gaussian_diag({-1.4, -0.5}, {0.3, 0.5});
  DistExpr e;
  e.n_args = 2;
  e.terms.push_back(DistTerm{1.0, {ShellFactor::delta(Sign::Plus, 1.0), ShellFactor::delta_prime(Sign::Minus, 1.0)}, {}});
  const cplx a = smear(single_factor(ShellFactor::delta(Sign::Plus, 1.0)), {f}, spec).value;
  const cplx b = smear(single_factor(ShellFactor::delta_prime(Sign::Minus, 1.0)), {g}, spec).value;
  CHECK(rel(smear(e, {f, g}, spec).value, a * b) < 1e-9);
}

TEST_CASE("two-point commutator and equation of motion") {
  MomentModel model;
  const DistExpr w2 = wightman_truncated(2, model);
  const WavePacket f = WavePacket::gaussian_diag({-1.2, 0.3}, {0.4, 0.4});
  const WavePacket g = WavePacket::gaussian_diag({1.1, -0.2}, {0.5, 0.3});

  CHECK(commutator_pairing(w2, f, f, spec).value == cplx(0.0));

  const cplx direct = smear(w2, {f, g}, spec).value - smear(w2, {g, f}, spec).value;
  CHECK(std::abs(commutator_pairing(w2, f, g, spec).value - direct) <= 1e-10 * std::abs(direct));

  const Poly sh = Poly::shell(2, 1.0);
  const DistExpr killed = apply_multiplier(w2, 0, Multiplier::smooth_poly(sh * sh));
  const SmearValue v = smear(killed, {f, g}, spec);
  CHECK(std::abs(v.value) <= std::max(v.err_est, 1e-14));
}

TEST_CASE("structural errors") {
  const WavePacket p = WavePacket::gaussian_diag({1.3, 0.2}, {0.4, 0.5});
  CHECK_THROWS_AS(smear(single_factor(ShellFactor::delta(Sign::Plus, 1.0)), {p, p}, spec), DimensionMismatch);
  CHECK_THROWS_AS(ShellFactor::delta(Sign::None, 1.0).validate(), InvalidArgument);
  CHECK_THROWS_AS(ShellFactor::delta(Sign::Plus, -1.0).validate(), InvalidArgument);

  // the eliminated FP variable k2 = -k1 sits exactly on the shell
  DistExpr e;
  e.n_args = 2;
  e.terms.push_back(DistTerm{1.0, {ShellFactor::delta(Sign::Plus, 1.0), ShellFactor::fp(1.0)}, {1, 1}});
  const WavePacket q = WavePacket::gaussian_diag({-1.2, 0.0}, {0.3, 0.3});
  CHECK_THROWS_AS(smear(e, {p, q}, spec), PoleProximity);
}
