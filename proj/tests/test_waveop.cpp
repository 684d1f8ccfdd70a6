#include <doctest.h>

#include <cmath>

#include "dipole/serialize.hpp"

using namespace dipole;

namespace {

const QuadSpec spec;
const Cutoff cut = Cutoff::standard(1.0);

double phi(double kappa) { return cut.phi(cplx(kappa)).real(); }

std::vector<double> on_shell(double k1, int sign) {
  return {sign * std::sqrt(1 + k1 * k1), k1};
}

// Largest |forward difference of order o| / h^o over [-0.6, 0.6].
std::vector<double> max_derivatives(double h) {
  std::vector<double> m(5, 0.0);
  for (double k = -0.6; k <= 0.6; k += 1e-3) {
    double f[5];
    for (int j = 0; j < 5; ++j) f[j] = phi(k + j * h);
    for (int o = 1; o <= 4; ++o) {
      for (int j = 0; j + o < 5; ++j) f[j] = f[j + 1] - f[j];
      m[o] = std::max(m[o], std::abs(f[0]) / std::pow(h, o));
    }
  }
  return m;
}

}  // namespace

TEST_CASE("cutoff plateau, support and smoothness") {
  const int n = 10000;
  for (int i = 0; i <= n; ++i) {
    const double k = -0.6 + 1.2 * i / n;
    const double v = phi(k);
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
    if (std::abs(k) <= 0.25) CHECK(v == 1.0);
    if (std::abs(k) >= 0.5) CHECK(v == 0.0);
  }
  // derivative bounds stay put when the step is halved
  const auto a = max_derivatives(2e-3), b = max_derivatives(1e-3);
  for (int o = 1; o <= 4; ++o) {
    CHECK(std::isfinite(b[o]));
    CHECK(b[o] == doctest::Approx(a[o]).epsilon(0.05));
  }
  CHECK_THROWS_AS(Cutoff(1.0, 1.0), InvalidArgument);
  CHECK_THROWS_AS(Cutoff(0.0, 1.0), InvalidArgument);
}

TEST_CASE("multiplier point values") {
  for (double k1 : {-0.8, 0.0, 0.35, 1.7}) {
    for (Channel c : {Channel::In, Channel::Out}) {
      CHECK(std::abs(eval_multiplier(Multiplier::chi_d_t(c, 0.0, 1.0, cut), on_shell(k1, 1)) - 1.0) < 1e-15);
      CHECK(std::abs(eval_multiplier(Multiplier::chi_d_t(c, 0.0, 1.0, cut), on_shell(k1, -1)) - 1.0) < 1e-15);
    }
    for (double t : {0.0, 5.0, 123.0}) {
      CHECK(std::abs(eval_multiplier(Multiplier::chi_t(Channel::Out, t, 1.0, cut), on_shell(k1, 1)) - 1.0) < 1e-15);
      CHECK(eval_multiplier(Multiplier::chi_d_t(Channel::Loc, t, 1.0, cut), {0.3, k1}) == cplx(1.0));
      CHECK(eval_multiplier(Multiplier::chi_t(Channel::Loc, t, 1.0, cut), {0.3, k1}) == cplx(1.0));
    }
    // k^2 - m^2 = eps is outside the support of phi
    const double k0 = std::sqrt(1 + k1 * k1 + cut.eps);
    CHECK(eval_multiplier(Multiplier::chi_d_t(Channel::Out, 7.0, 1.0, cut), {k0, k1}) == cplx(0.0));
  }
}

TEST_CASE("dipole correction vanishes on the shell") {
  // k = ((a^2+1)/(2a), +/-(a^2-1)/(2a)) with a a power of two is exactly on
  // the unit shell in floating point
  Lcg rng(5);
  for (int i = 0; i < 100; ++i) {
    const double a = std::ldexp(1.0, static_cast<int>(rng.uniform(-3, 4)));
    const double k0 = (a * a + 1) / (2 * a), k1 = (a * a - 1) / (2 * a);
    const int sg = i % 2 ? -1 : 1;
    const std::vector<double> k{sg * k0, (i / 2) % 2 ? -k1 : k1};
    REQUIRE(k[0] * k[0] - k[1] * k[1] - 1.0 == 0.0);
    const double t = rng.uniform(0, 100);
    const Channel c = i % 3 ? Channel::Out : Channel::In;
    const cplx d = eval_multiplier(Multiplier::chi_d_t(c, t, 1.0, cut), k) -
                   eval_multiplier(Multiplier::chi_t(c, t, 1.0, cut), k);
    CHECK(std::abs(d) <= 1e-15);
  }
}

TEST_CASE("Haag-Ruelle multiplier is an alias of chi_t") {
  Lcg rng(6);
  for (int i = 0; i < 50; ++i) {
    const std::vector<double> k{rng.uniform(-2, 2), rng.uniform(-2, 2)};
    const double t = rng.uniform(0, 50);
    for (Channel c : {Channel::In, Channel::Loc, Channel::Out})
      CHECK(eval_multiplier(Multiplier::haag_ruelle(c, t, 1.0, cut), k) ==
            eval_multiplier(Multiplier::chi_t(c, t, 1.0, cut), k));
  }
}

TEST_CASE("wave operator handle") {
  Lcg rng(7);
  const WavePacket p = random_packet(rng, 2, Sign::Plus);
  const Multiplier mu = Multiplier::chi_d_t(Channel::Out, 12.0, 1.0, cut);
  const WaveOpHandle h = apply_waveop(mu, p);
  for (int i = 0; i < 5; ++i) {
    const std::vector<double> k{p.center()[0] + rng.uniform(-0.3, 0.3), p.center()[1] + rng.uniform(-0.3, 0.3)};
    CHECK(std::abs(h.eval(k) - eval_multiplier(mu, k) * p.eval(k)) <= 1e-14 * std::abs(p.eval(k)));
    CHECK(apply_waveop(Multiplier::chi_d_t(Channel::Loc, 12.0, 1.0, cut), p).eval(k) == p.eval(k));
  }
}

TEST_CASE("shell smears are invariant under chi^d_t") {
  Lcg rng(8);
  std::vector<WavePacket> packets;
  for (int i = 0; i < 10; ++i) packets.push_back(random_packet(rng, 2));
  const std::vector<double> ts{0, 1, 10, 100};

  const LemmaReport a3 = verify_lemma_A3_A4(ShellLemma::A3, Channel::Out, Sign::Plus, ts, packets, spec);
  CHECK(a3.pass);
  CHECK(a3.max_rel_dev <= 1e-8);
  const LemmaReport a4 = verify_lemma_A3_A4(ShellLemma::A4, Channel::In, Sign::Minus, ts, packets, spec);
  CHECK(a4.pass);
  CHECK(a4.max_rel_dev <= 1e-7);
  for (const auto& c : a4.cases)
    if (c.t == 0.0) CHECK(c.rel_dev <= 1e-12);

  CHECK_THROWS_AS(verify_lemma_A3_A4(ShellLemma::A3, Channel::Out, Sign::Plus, ts, {}, spec), InvalidArgument);
}

TEST_CASE("multiplier kind names") {
  CHECK(parse_mult_kind("chi_t") == MultKind::ChiT);
  CHECK(parse_mult_kind("chi_d_t") == MultKind::ChiDT);
  CHECK(parse_mult_kind("haag_ruelle") == MultKind::HaagRuelleOnly);
  CHECK_THROWS_AS(parse_mult_kind("lsz"), ParseError);
}
