#pragma once

#include <utility>
#include <vector>

#include "dipole/model.hpp"
#include "dipole/scatter.hpp"

namespace dipole {

struct CouplingMeasure {
  std::vector<std::pair<double, double>> atoms;  // (alpha_i, w_i)
  bool trigonometric = false;                    // alpha -> i alpha

  static CouplingMeasure sinh_gordon();
  void validate() const;
  // sum_i w_i alpha_i^q, times i^q in the trigonometric case
  cplx moment(int q) const;
  bool symmetric() const;
};

// (S, I): S a subset of {0..n-1} (ascending), I a pair partition of the
// complement. Canonical order: by |S|, then lexicographically.
struct SubsetPairing {
  std::vector<int> subset;
  Partition pairing;
};
std::vector<SubsetPairing> subset_pairings(int n);

double free_kernel(const std::vector<double>& a, const std::vector<double>& b, double mass);

// <phi(x_1)...phi(x_n) :exp(alpha phi(x)):>
double wick_exp_correlation(const std::vector<std::vector<double>>& points, const std::vector<double>& x,
                            double alpha, const MomentModel& model);

struct SubsetContribution {
  std::vector<int> subset;
  cplx moment{0.0};
  double integral = 0.0;  // int prod_{j in S} G(x_j - x) dx
  double integral_err = 0.0;
  double pairing_factor = 0.0;  // sum over pair partitions of the complement
  cplx value{0.0};              // -(lambda/2) moment integral pairing_factor
};

struct FirstOrderReport {
  double free_part = 0.0;
  cplx correction{0.0};
  double err_est = 0.0;
  cplx value{0.0};
  std::vector<SubsetContribution> terms;
  // The empty subset is never generated: its volume factor is the one
  // removed by the normalization.
  bool volume_term_consumed = true;
};
FirstOrderReport first_order_schwinger(const std::vector<std::vector<double>>& points, double lambda,
                                       const CouplingMeasure& rho, const MomentModel& model, const QuadSpec& spec);

// q = 2: -(q2_constant mu_2 / m^4) delta'-(k1) delta(k1 + k2);
// q >= 3: c~_q sum_j prod delta- . PV . prod delta+ with conservation, where
// the cumulant is replaced by the q-th moment of rho.
DistExpr first_order_wightman_term(int q, const MomentModel& model, const CouplingMeasure& rho,
                                   double q2_constant = 1.0);

// Ratio of the first-order q = 2 Euclidean contribution to (mu_2/m^4) times
// the order-2 kernel at the given separation; reported, never assumed.
struct Q2Constant {
  cplx constant{0.0};
  double err_est = 0.0;
};
Q2Constant q2_fitted_constant(double lambda, const CouplingMeasure& rho, const MomentModel& model,
                              const std::vector<double>& separation, const QuadSpec& spec);

struct FirstOrderSMatrixReport {
  RegReport closed_form;       // 2 pi i c~_q prod delta+ delta(...)
  LimitPathReport limit_path;  // chi_t multipliers on the q-th term, t -> infinity
  // max over t of |q = 2 term with chi^d in/out multipliers - plain q = 2 term|
  double q2_dipole_deviation = 0.0;
  double q2_scale = 0.0;
};
DistExpr first_order_smatrix_expr(int q, int r, const MomentModel& model, const CouplingMeasure& rho);
FirstOrderSMatrixReport first_order_smatrix(int q, int r, const MomentModel& model, const CouplingMeasure& rho,
                                            const std::vector<WavePacket>& packets, const TGrid& grid,
                                            const QuadSpec& spec, const RegSpec& reg = {}, bool run_limit_path = true);

}  // namespace dipole
