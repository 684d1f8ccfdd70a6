#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "dipole/common.hpp"
#include "dipole/jet.hpp"
#include "dipole/packet.hpp"
#include "dipole/poly.hpp"
#include "dipole/quad.hpp"

namespace dipole {

// Smooth plateau bump: phi = 1 on |kappa| <= eps/2, phi = 0 for |kappa| >= eps.
struct Cutoff {
  double eps = 0.5;
  Cutoff() = default;
  Cutoff(double eps_, double mass);
  static Cutoff standard(double mass) { return Cutoff(0.5 * mass * mass, mass); }

  // h(x) = g(x) / (g(x) + g(1-x)), g(x) = exp(-1/x) for x > 0.
  template <class S>
  static S step(const S& x) {
    const double x0 = std::real(scalar_value(x));
    if (x0 <= 0.0) return S(0.0);
    if (x0 >= 1.0) return S(1.0);
    const S gx = exp(-inv(x));
    const S gy = exp(-inv(S(1.0) - x));
    return gx / (gx + gy);
  }

  template <class S>
  S phi(const S& kappa) const {
    const double k0 = std::real(scalar_value(kappa));
    const S absk = k0 < 0 ? -kappa : kappa;
    return step((S(eps) - absk) * (2.0 / eps));
  }
};

enum class MultKind { ChiT, ChiDT, HaagRuelleOnly, SmoothPoly, Product };
const char* to_string(MultKind k);
MultKind parse_mult_kind(const std::string& s);

struct Multiplier {
  MultKind kind = MultKind::SmoothPoly;
  Channel channel = Channel::Loc;
  double t = 0.0;
  Cutoff cutoff;
  double mass = 1.0;
  Poly poly;
  std::vector<Multiplier> factors;

  static Multiplier chi_t(Channel c, double t, double mass, Cutoff cut);
  static Multiplier chi_d_t(Channel c, double t, double mass, Cutoff cut);
  static Multiplier haag_ruelle(Channel c, double t, double mass, Cutoff cut);
  static Multiplier smooth_poly(Poly p);
  static Multiplier product(std::vector<Multiplier> f);

  // Half-width of the shell neighbourhood outside which the multiplier is
  // identically zero, or a negative value when it is not shell-localized.
  double shell_support() const;
  // Largest |t| among the time-dependent pieces.
  double max_time() const;
  bool is_identity() const;
};

template <class S>
S eval_multiplier(const Multiplier& mu, const S& k0, const double* spatial, int dim) {
  switch (mu.kind) {
    case MultKind::SmoothPoly:
      return mu.poly.eval(k0, spatial);
    case MultKind::Product: {
      S r(1.0);
      for (const auto& f : mu.factors) r = r * eval_multiplier(f, k0, spatial, dim);
      return r;
    }
    case MultKind::ChiT:
    case MultKind::ChiDT:
    case MultKind::HaagRuelleOnly: {
      if (mu.channel == Channel::Loc) return S(1.0);
      double kk = 0.0;
      for (int a = 0; a + 1 < dim; ++a) kk += spatial[a] * spatial[a];
      const double w = std::sqrt(kk + mu.mass * mu.mass);
      const S s = k0 * k0 - S(kk + mu.mass * mu.mass);
      const double re0 = std::real(scalar_value(k0));
      if (re0 == 0.0) return S(0.0);
      const S ph = re0 > 0 ? k0 - S(w) : k0 + S(w);
      const double dir = mu.channel == Channel::Out ? 1.0 : -1.0;
      S r = mu.cutoff.phi(s) * exp(ph * cplx(0.0, dir * mu.t));
      if (mu.kind == MultKind::ChiDT) {
        // [1 - i t s / (2 k0)] for out, [1 + i t s / (2 k0)] for in
        r = r * (S(1.0) - s * inv(k0 * 2.0) * cplx(0.0, dir * mu.t));
      }
      return r;
    }
  }
  return S(0.0);
}

cplx eval_multiplier(const Multiplier& mu, const std::vector<double>& k);

// Pointwise product k -> mu(k) f(k); this is the momentum-space form of the
// one-particle wave operator acting on f.
class WaveOpHandle {
 public:
  WaveOpHandle(Multiplier mu, WavePacket p) : mu_(std::move(mu)), p_(std::move(p)) {}
  template <class S>
  S eval(const S& k0, const double* spatial) const {
    return eval_multiplier(mu_, k0, spatial, p_.dim()) * p_.eval(k0, spatial);
  }
  cplx eval(const std::vector<double>& k) const;
  const Multiplier& multiplier() const { return mu_; }
  const WavePacket& packet() const { return p_; }

 private:
  Multiplier mu_;
  WavePacket p_;
};

WaveOpHandle apply_waveop(const Multiplier& mu, const WavePacket& p);

enum class ShellLemma { A3, A4 };

struct LemmaCase {
  int packet_index;
  double t;
  cplx plain;
  cplx multiplied;
  double rel_dev;
  double err_est;
};

struct LemmaReport {
  ShellLemma lemma;
  Channel channel;
  Sign sign;
  std::vector<LemmaCase> cases;
  double max_rel_dev = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

// Checks chi^d_t(a,k) delta(+/-) = delta(+/-) (A3) or the same with delta'
// (A4) by smearing against each packet at each t.
LemmaReport verify_lemma_A3_A4(ShellLemma which, Channel channel, Sign sign, const std::vector<double>& t_list,
                               const std::vector<WavePacket>& packets, const QuadSpec& spec,
                               double mass = 1.0, double tolerance = -1.0);

}  // namespace dipole
