#pragma once

// Truncated multivariate Taylor numbers with nilpotent generators
// e_0..e_{K-1}, e_a^2 = 0. A Jet stores the 2^K coefficients indexed by the
// subset mask of generators, so the top coefficient of f(x0 + e_0, y0 + e_1)
// is the exact mixed partial d^2 f / dx dy at (x0, y0).

#include <array>
#include <cmath>

#include "dipole/common.hpp"

namespace dipole {

class Jet {
 public:
  static constexpr int kMaxVars = 4;
  static constexpr int kSize = 1 << kMaxVars;

  Jet() { c_.fill(cplx(0.0)); }
  Jet(cplx v) : Jet() { c_[0] = v; }  // NOLINT(google-explicit-constructor)
  Jet(double v) : Jet() { c_[0] = v; }  // NOLINT(google-explicit-constructor)

  // v + e_slot
  static Jet variable(cplx v, int slot) {
    if (slot < 0 || slot >= kMaxVars) throw InvalidArgument("jet slot out of range");
    Jet j(v);
    j.nvars_ = slot + 1;
    j.c_[1u << slot] = 1.0;
    return j;
  }

  int nvars() const { return nvars_; }
  int size() const { return 1 << nvars_; }
  cplx value() const { return c_[0]; }
  cplx coeff(unsigned mask) const { return mask < static_cast<unsigned>(kSize) ? c_[mask] : cplx(0.0); }
  cplx& coeff_ref(unsigned mask) { return c_[mask]; }
  // Coefficient of e_0 e_1 ... e_{k-1}.
  cplx top(int k) const { return c_[(1u << k) - 1u]; }
  void widen(int k) {
    if (k > nvars_) nvars_ = k;
  }

  Jet& operator+=(const Jet& o) {
    widen(o.nvars_);
    for (int i = 0; i < o.size(); ++i) c_[i] += o.c_[i];
    return *this;
  }
  Jet& operator-=(const Jet& o) {
    widen(o.nvars_);
    for (int i = 0; i < o.size(); ++i) c_[i] -= o.c_[i];
    return *this;
  }
  Jet& operator*=(cplx s) {
    for (int i = 0; i < size(); ++i) c_[i] *= s;
    return *this;
  }
  Jet& operator*=(double s) {
    for (int i = 0; i < size(); ++i) c_[i] *= s;
    return *this;
  }
  Jet& operator*=(const Jet& o) {
    *this = *this * o;
    return *this;
  }
  Jet& operator/=(const Jet& o) {
    *this = *this * inv(o);
    return *this;
  }

  friend Jet operator-(const Jet& a) {
    Jet r(a);
    for (int i = 0; i < r.size(); ++i) r.c_[i] = -r.c_[i];
    return r;
  }
  friend Jet operator+(Jet a, const Jet& b) { return a += b; }
  friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
  friend Jet operator*(const Jet& a, const Jet& b) {
    if (a.nvars_ == 0) return b * a.c_[0];
    if (b.nvars_ == 0) return a * b.c_[0];
    Jet r;
    r.nvars_ = a.nvars_ > b.nvars_ ? a.nvars_ : b.nvars_;
    const unsigned n = static_cast<unsigned>(r.size());
    for (unsigned m = 0; m < n; ++m) {
      cplx acc = 0.0;
      // iterate over submasks s of m
      for (unsigned s = m;; s = (s - 1) & m) {
        acc += a.c_[s] * b.c_[m ^ s];
        if (s == 0) break;
      }
      r.c_[m] = acc;
    }
    return r;
  }
  friend Jet operator*(Jet a, cplx s) { return a *= s; }
  friend Jet operator*(cplx s, Jet a) { return a *= s; }
  friend Jet operator*(Jet a, double s) { return a *= s; }
  friend Jet operator*(double s, Jet a) { return a *= s; }
  friend Jet operator/(const Jet& a, const Jet& b) { return a * inv(b); }
  friend Jet operator/(Jet a, double s) { return a *= (1.0 / s); }
  friend Jet operator/(double s, const Jet& b) { return inv(b) * s; }

  // f(x) where derivs[j] = f^{(j)}(x.value()) for j = 0..nvars.
  template <class D>
  static Jet compose(const Jet& x, const D& derivs) {
    Jet r(derivs[0]);
    if (x.nvars_ == 0) return r;
    Jet nil(x);
    nil.c_[0] = 0.0;
    Jet pw(nil);
    double fact = 1.0;
    for (int j = 1; j <= x.nvars_; ++j) {
      fact *= j;
      r += pw * (derivs[j] / fact);
      if (j < x.nvars_) pw = pw * nil;
    }
    r.widen(x.nvars_);
    return r;
  }

  friend Jet inv(const Jet& x) {
    std::array<cplx, kMaxVars + 1> d{};
    const cplx x0 = x.c_[0];
    cplx p = 1.0 / x0;
    double f = 1.0;
    for (int j = 0; j <= x.nvars_; ++j) {
      d[j] = (j % 2 ? -1.0 : 1.0) * f * p;
      p /= x0;
      f *= (j + 1);
    }
    return compose(x, d);
  }
  friend Jet exp(const Jet& x) {
    std::array<cplx, kMaxVars + 1> d{};
    const cplx e = std::exp(x.c_[0]);
    for (int j = 0; j <= x.nvars_; ++j) d[j] = e;
    return compose(x, d);
  }
  friend Jet sqrt(const Jet& x) {
    std::array<cplx, kMaxVars + 1> d{};
    const cplx x0 = x.c_[0];
    cplx v = std::sqrt(x0);
    double coef = 1.0;
    for (int j = 0; j <= x.nvars_; ++j) {
      d[j] = coef * v;
      coef *= (0.5 - j);
      v /= x0;
    }
    return compose(x, d);
  }

 private:
  std::array<cplx, kSize> c_;
  int nvars_ = 0;
};

// Scalar helpers so templated code can use one spelling for cplx and Jet.
inline cplx inv(cplx x) { return 1.0 / x; }
inline cplx scalar_value(const cplx& x) { return x; }
inline cplx scalar_value(const Jet& x) { return x.value(); }

template <class S>
S ipow(const S& x, int n) {
  S r(1.0);
  for (int i = 0; i < n; ++i) r = r * x;
  return r;
}

}  // namespace dipole
