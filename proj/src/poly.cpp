#include "dipole/poly.hpp"

#include <algorithm>

namespace dipole {

void Poly::check_dim(int dim) {
  if (dim < 1 || dim > kMaxDim) throw InvalidArgument("polynomial dimension must be in [1, 4]");
}

Poly Poly::constant(int dim, cplx c) {
  Poly p(dim);
  p.add_term(MultiIndex{}, c);
  return p;
}

Poly Poly::monomial(int dim, const MultiIndex& e, cplx c) {
  Poly p(dim);
  p.add_term(e, c);
  return p;
}

Poly Poly::shell(int dim, double mass) {
  Poly p(dim);
  MultiIndex e{};
  e[0] = 2;
  p.add_term(e, 1.0);
  for (int a = 1; a < dim; ++a) {
    MultiIndex f{};
    f[a] = 2;
    p.add_term(f, -1.0);
  }
  p.add_term(MultiIndex{}, -mass * mass);
  return p;
}

int Poly::degree() const {
  int d = 0;
  for (const auto& [e, c] : terms_) {
    int s = 0;
    for (int a = 0; a < dim_; ++a) s += e[a];
    d = std::max(d, s);
  }
  return d;
}

cplx Poly::coeff(const MultiIndex& e) const {
  auto it = terms_.find(e);
  return it == terms_.end() ? cplx(0.0) : it->second;
}

void Poly::add_term(const MultiIndex& e, cplx c) {
  for (int a = 0; a < kMaxDim; ++a) {
    if (e[a] < 0) throw InvalidArgument("negative exponent in polynomial");
    if (a >= dim_ && e[a] != 0) throw InvalidArgument("exponent beyond polynomial dimension");
  }
  if (c == cplx(0.0)) return;
  auto [it, inserted] = terms_.emplace(e, c);
  if (!inserted) {
    it->second += c;
    if (it->second == cplx(0.0)) terms_.erase(it);
  }
}

void Poly::prune() {
  for (auto it = terms_.begin(); it != terms_.end();) {
    if (it->second == cplx(0.0))
      it = terms_.erase(it);
    else
      ++it;
  }
}

Poly Poly::operator+(const Poly& o) const {
  if (o.dim_ != dim_) throw DimensionMismatch("polynomial dimensions differ");
  Poly r(*this);
  for (const auto& [e, c] : o.terms_) r.add_term(e, c);
  return r;
}

Poly Poly::operator-(const Poly& o) const { return *this + o * cplx(-1.0); }

Poly Poly::operator*(const Poly& o) const {
  if (o.dim_ != dim_) throw DimensionMismatch("polynomial dimensions differ");
  Poly r(dim_);
  for (const auto& [e1, c1] : terms_)
    for (const auto& [e2, c2] : o.terms_) {
      MultiIndex e{};
      for (int a = 0; a < kMaxDim; ++a) e[a] = e1[a] + e2[a];
      r.add_term(e, c1 * c2);
    }
  return r;
}

Poly Poly::operator*(cplx s) const {
  Poly r(dim_);
  for (const auto& [e, c] : terms_) r.add_term(e, c * s);
  return r;
}

Poly Poly::derivative(int axis) const {
  Poly r(dim_);
  for (const auto& [e, c] : terms_) {
    if (e[axis] == 0) continue;
    MultiIndex f = e;
    f[axis] -= 1;
    r.add_term(f, c * static_cast<double>(e[axis]));
  }
  return r;
}

Poly Poly::compose_affine(const std::vector<double>& shift, const std::vector<double>& signs) const {
  if (static_cast<int>(shift.size()) != dim_ || static_cast<int>(signs.size()) != dim_)
    throw DimensionMismatch("affine substitution size mismatch");
  // (shift_a + sign_a q_a)^n expanded binomially per axis.
  Poly r(dim_);
  for (const auto& [e, c] : terms_) {
    Poly acc = Poly::constant(dim_, c);
    for (int a = 0; a < dim_; ++a) {
      if (e[a] == 0) continue;
      Poly lin(dim_);
      lin.add_term(MultiIndex{}, shift[a]);
      MultiIndex u{};
      u[a] = 1;
      lin.add_term(u, signs[a]);
      for (int p = 0; p < e[a]; ++p) acc = acc * lin;
    }
    r = r + acc;
  }
  r.prune();
  return r;
}

cplx Poly::eval(const std::vector<double>& k) const {
  if (static_cast<int>(k.size()) != dim_) throw DimensionMismatch("point dimension mismatch");
  return eval<cplx>(cplx(k[0]), k.data() + 1);
}

}  // namespace dipole
