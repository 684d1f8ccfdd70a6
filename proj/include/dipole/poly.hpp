#pragma once

#include <array>
#include <map>
#include <vector>

#include "dipole/common.hpp"
#include "dipole/jet.hpp"

namespace dipole {

inline constexpr int kMaxDim = 4;
using MultiIndex = std::array<int, kMaxDim>;

// Multivariate polynomial in k = (k^0, k^1, ..., k^{d-1}) with complex
// coefficients. Terms are kept in a std::map so iteration order (and thus
// every sum built from it) is deterministic.
class Poly {
 public:
  Poly() = default;
  explicit Poly(int dim) : dim_(dim) { check_dim(dim); }
  static Poly constant(int dim, cplx c);
  static Poly monomial(int dim, const MultiIndex& e, cplx c = 1.0);
  // k^2 - m^2 with the Minkowski metric.
  static Poly shell(int dim, double mass);

  int dim() const { return dim_; }
  int degree() const;
  bool is_zero() const { return terms_.empty(); }
  const std::map<MultiIndex, cplx>& terms() const { return terms_; }
  cplx coeff(const MultiIndex& e) const;
  void add_term(const MultiIndex& e, cplx c);

  Poly operator+(const Poly& o) const;
  Poly operator-(const Poly& o) const;
  Poly operator*(const Poly& o) const;
  Poly operator*(cplx s) const;
  Poly derivative(int axis) const;
  // P(shift + diag(signs) q) as a polynomial in q.
  Poly compose_affine(const std::vector<double>& shift, const std::vector<double>& signs) const;

  // Evaluate with k^0 of scalar type S and real spatial components.
  template <class S>
  S eval(const S& k0, const double* spatial) const {
    if (terms_.empty()) return S(0.0);
    const int deg = degree();
    std::array<std::vector<double>, kMaxDim> sp;
    for (int a = 1; a < dim_; ++a) {
      sp[a].assign(deg + 1, 1.0);
      for (int p = 1; p <= deg; ++p) sp[a][p] = sp[a][p - 1] * spatial[a - 1];
    }
    std::vector<S> t0(deg + 1, S(1.0));
    for (int p = 1; p <= deg; ++p) t0[p] = t0[p - 1] * k0;
    S acc(0.0);
    for (const auto& [e, c] : terms_) {
      cplx w = c;
      for (int a = 1; a < dim_; ++a) w *= sp[a][e[a]];
      acc += t0[e[0]] * w;
    }
    return acc;
  }
  cplx eval(const std::vector<double>& k) const;

  friend bool operator==(const Poly& a, const Poly& b) { return a.dim_ == b.dim_ && a.terms_ == b.terms_; }

 private:
  static void check_dim(int dim);
  void prune();
  int dim_ = 2;
  std::map<MultiIndex, cplx> terms_;
};

}  // namespace dipole
