#pragma once

#include <vector>

#include "dipole/common.hpp"
#include "dipole/jet.hpp"
#include "dipole/poly.hpp"

namespace dipole {

// poly(k) * exp(-1/2 (k-mu)^T A (k-mu)) * exp(i k.b), k.b = k^0 b^0 - k.b
// (Minkowski pairing). Immutable after construction.
class WavePacket {
 public:
  WavePacket(Poly poly, std::vector<double> center, std::vector<double> widths,
             std::vector<double> phase_shift);
  static WavePacket gaussian(std::vector<double> center, std::vector<double> widths,
                             std::vector<double> phase_shift = {});
  // Isotropic helper: A = diag(1/sigma_a^2).
  static WavePacket gaussian_diag(std::vector<double> center, std::vector<double> sigmas);

  int dim() const { return dim_; }
  const Poly& poly() const { return poly_; }
  const std::vector<double>& center() const { return center_; }
  const std::vector<double>& widths() const { return widths_; }
  const std::vector<double>& phase_shift() const { return phase_; }
  double width(int a, int b) const { return widths_[a * dim_ + b]; }
  // Marginal standard deviation of the Gaussian along axis a, sqrt((A^-1)_aa).
  double sigma(int a) const { return sigma_[a]; }

  template <class S>
  S eval(const S& k0, const double* spatial) const {
    S d0 = k0 - S(center_[0]);
    double ds[kMaxDim] = {0, 0, 0, 0};
    for (int a = 1; a < dim_; ++a) ds[a] = spatial[a - 1] - center_[a];
    double cross = 0.0, rest = 0.0;
    for (int a = 1; a < dim_; ++a) {
      cross += width(0, a) * ds[a];
      for (int b = 1; b < dim_; ++b) rest += width(a, b) * ds[a] * ds[b];
    }
    S quad = d0 * d0 * width(0, 0) + d0 * (2.0 * cross) + S(rest);
    double ph_sp = 0.0;
    for (int a = 1; a < dim_; ++a) ph_sp -= spatial[a - 1] * phase_[a];
    S expo = quad * (-0.5) + (k0 * phase_[0] + S(ph_sp)) * kI;
    return poly_.eval(k0, spatial) * exp(expo);
  }
  cplx eval(const std::vector<double>& k) const;

 private:
  int dim_;
  Poly poly_;
  std::vector<double> center_, widths_, phase_, sigma_;
};

inline cplx eval_packet(const WavePacket& p, const std::vector<double>& k) { return p.eval(k); }

// Exact transform with kernel (2 pi)^{-d/2} exp(-/+ i k.x), Minkowski pairing.
WavePacket fourier(const WavePacket& p, bool inverse);

enum class PacketOp { Add, Scale, MultiplyPoly };
WavePacket packet_add(const WavePacket& p, const WavePacket& q);
WavePacket packet_scale(const WavePacket& p, cplx s);
WavePacket packet_multiply_poly(const WavePacket& p, const Poly& q);
// k -> -k together with complex conjugation of the coefficients; used for the
// hermiticity checks of two-point functions.
WavePacket packet_conjugate_reflect(const WavePacket& p);
WavePacket packet_reflect(const WavePacket& p);

}  // namespace dipole
