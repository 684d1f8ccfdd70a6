#include "dipole/packet.hpp"

#include <Eigen/Dense>
#include <cmath>

namespace dipole {

namespace {

Eigen::MatrixXd to_matrix(const std::vector<double>& a, int d) {
  Eigen::MatrixXd m(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) m(i, j) = a[i * d + j];
  return m;
}

std::vector<double> to_rowmajor(const Eigen::MatrixXd& m) {
  const int d = static_cast<int>(m.rows());
  std::vector<double> a(d * d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) a[i * d + j] = m(i, j);
  return a;
}

std::vector<double> metric_signs(int d) {
  std::vector<double> s(d, -1.0);
  s[0] = 1.0;
  return s;
}

}  // namespace

WavePacket::WavePacket(Poly poly, std::vector<double> center, std::vector<double> widths,
                       std::vector<double> phase_shift)
    : dim_(static_cast<int>(center.size())),
      poly_(std::move(poly)),
      center_(std::move(center)),
      widths_(std::move(widths)),
      phase_(std::move(phase_shift)) {
  if (dim_ < 2 || dim_ > kMaxDim) throw InvalidArgument("packet dimension must be in [2, 4]");
  if (poly_.dim() != dim_) throw DimensionMismatch("packet polynomial dimension differs from center");
  if (phase_.empty()) phase_.assign(dim_, 0.0);
  if (static_cast<int>(widths_.size()) != dim_ * dim_ || static_cast<int>(phase_.size()) != dim_)
    throw DimensionMismatch("packet width matrix or phase shift has wrong size");
  for (int i = 0; i < dim_; ++i)
    for (int j = 0; j < i; ++j)
      if (std::abs(width(i, j) - width(j, i)) > 1e-14 * (std::abs(width(i, j)) + std::abs(width(j, i))))
        throw InvalidArgument("packet width matrix is not symmetric");
  const Eigen::MatrixXd a = to_matrix(widths_, dim_);
  Eigen::LLT<Eigen::MatrixXd> llt(a);
  if (llt.info() != Eigen::Success) throw InvalidArgument("packet width matrix is not positive definite");
  const Eigen::MatrixXd ainv = llt.solve(Eigen::MatrixXd::Identity(dim_, dim_));
  sigma_.resize(dim_);
  for (int i = 0; i < dim_; ++i) sigma_[i] = std::sqrt(ainv(i, i));
}

WavePacket WavePacket::gaussian(std::vector<double> center, std::vector<double> widths,
                                std::vector<double> phase_shift) {
  const int d = static_cast<int>(center.size());
  return WavePacket(Poly::constant(d, 1.0), std::move(center), std::move(widths), std::move(phase_shift));
}

WavePacket WavePacket::gaussian_diag(std::vector<double> center, std::vector<double> sigmas) {
  const int d = static_cast<int>(center.size());
  if (static_cast<int>(sigmas.size()) != d) throw DimensionMismatch("sigma list size");
  std::vector<double> a(d * d, 0.0);
  for (int i = 0; i < d; ++i) a[i * d + i] = 1.0 / (sigmas[i] * sigmas[i]);
  return gaussian(std::move(center), std::move(a));
}

cplx WavePacket::eval(const std::vector<double>& k) const {
  if (static_cast<int>(k.size()) != dim_) throw DimensionMismatch("point dimension mismatch");
  return eval<cplx>(cplx(k[0]), k.data() + 1);
}

WavePacket fourier(const WavePacket& p, bool inverse) {
  const int d = p.dim();
  const std::vector<double> eta = metric_signs(d);
  const Eigen::MatrixXd a = to_matrix(p.widths(), d);
  Eigen::LLT<Eigen::MatrixXd> llt(a);
  const Eigen::MatrixXd ainv = llt.solve(Eigen::MatrixXd::Identity(d, d));
  const double det = llt.matrixL().determinant() * llt.matrixL().determinant();
  const std::vector<double>& mu = p.center();
  std::vector<double> beta(d);  // Euclidean phase vector: k.b = k^T eta b
  for (int i = 0; i < d; ++i) beta[i] = eta[i] * p.phase_shift()[i];

  // Euclidean transform of x^alpha e^{-1/2 (x-mu)A(x-mu) + i x.beta} at q is
  // det(A)^{-1/2} e^{i mu.nu - 1/2 nu A^{-1} nu} R_alpha(nu), nu = beta - q,
  // with R_alpha = (-i)^|alpha| prod_j D_j^{alpha_j} 1 and
  // D_j r = d_j r + r (i mu_j - (A^{-1} nu)_j).
  std::vector<Poly> lin(d, Poly(d));
  for (int j = 0; j < d; ++j) {
    lin[j].add_term(MultiIndex{}, cplx(0.0, mu[j]));
    for (int l = 0; l < d; ++l) {
      MultiIndex e{};
      e[l] = 1;
      lin[j].add_term(e, -ainv(j, l));
    }
  }
  Poly r_nu(d);
  for (const auto& [alpha, c] : p.poly().terms()) {
    Poly r = Poly::constant(d, 1.0);
    int total = 0;
    for (int j = 0; j < d; ++j)
      for (int s = 0; s < alpha[j]; ++s) {
        r = r.derivative(j) + r * lin[j];
        ++total;
      }
    cplx ph = 1.0;
    for (int s = 0; s < total; ++s) ph *= cplx(0.0, -1.0);
    r_nu = r_nu + r * (c * ph);
  }
  double mu_beta = 0.0;
  for (int i = 0; i < d; ++i) mu_beta += mu[i] * beta[i];
  const cplx pref = std::exp(cplx(0.0, mu_beta)) / std::sqrt(det);

  // nu = beta - q and q = s * eta k with s = +1 (forward) or -1 (inverse).
  const double s = inverse ? -1.0 : 1.0;
  std::vector<double> signs(d);
  for (int i = 0; i < d; ++i) signs[i] = -s * eta[i];
  Poly out_poly = r_nu.compose_affine(beta, signs) * pref;

  // Gaussian in q centred at beta with matrix A^{-1}; in k: centre s*eta*beta,
  // matrix eta A^{-1} eta. Phase e^{-i q.mu} = e^{-i s k^T eta mu} = e^{i k.(-s mu)}.
  std::vector<double> center(d), phase(d);
  Eigen::MatrixXd anew(d, d);
  for (int i = 0; i < d; ++i) {
    center[i] = s * eta[i] * beta[i];
    phase[i] = -s * mu[i];
    for (int j = 0; j < d; ++j) anew(i, j) = eta[i] * ainv(i, j) * eta[j];
  }
  anew = 0.5 * (anew + anew.transpose());
  return WavePacket(out_poly, center, to_rowmajor(anew), phase);
}

namespace {
bool same_gaussian(const WavePacket& p, const WavePacket& q) {
  return p.dim() == q.dim() && p.center() == q.center() && p.widths() == q.widths() &&
         p.phase_shift() == q.phase_shift();
}
}  // namespace

WavePacket packet_add(const WavePacket& p, const WavePacket& q) {
  if (!same_gaussian(p, q)) throw MismatchedGaussian("packet_add requires identical (A, mu, b)");
  return WavePacket(p.poly() + q.poly(), p.center(), p.widths(), p.phase_shift());
}

WavePacket packet_scale(const WavePacket& p, cplx s) {
  return WavePacket(p.poly() * s, p.center(), p.widths(), p.phase_shift());
}

WavePacket packet_multiply_poly(const WavePacket& p, const Poly& q) {
  if (q.dim() != p.dim()) throw DimensionMismatch("multiplier polynomial dimension");
  return WavePacket(p.poly() * q, p.center(), p.widths(), p.phase_shift());
}

WavePacket packet_reflect(const WavePacket& p) {
  const int d = p.dim();
  std::vector<double> zero(d, 0.0), minus(d, -1.0), center(d), phase(d);
  for (int i = 0; i < d; ++i) {
    center[i] = -p.center()[i];
    phase[i] = -p.phase_shift()[i];
  }
  return WavePacket(p.poly().compose_affine(zero, minus), center, p.widths(), phase);
}

WavePacket packet_conjugate_reflect(const WavePacket& p) {
  const int d = p.dim();
  std::vector<double> zero(d, 0.0), minus(d, -1.0), center(d);
  for (int i = 0; i < d; ++i) center[i] = -p.center()[i];
  Poly refl = p.poly().compose_affine(zero, minus);
  Poly conj(d);
  for (const auto& [e, c] : refl.terms()) conj.add_term(e, std::conj(c));
  return WavePacket(conj, center, p.widths(), p.phase_shift());
}

}  // namespace dipole
