#pragma once

#include <functional>
#include <vector>

#include "dipole/common.hpp"

namespace dipole {

struct QuadSpec {
  double abs_tol = 1e-10;
  double rel_tol = 1e-9;
  int max_depth = 50;
  double truncation_radius = 12.0;
  // Upper bound on the number of subintervals kept by one 1-D adaptive run.
  int max_intervals = 2000;
  // Throw ToleranceNotMet instead of flagging the result.
  bool strict = false;
  void validate() const;
};

struct SmearValue {
  cplx value{0.0};
  double err_est = 0.0;
  long n_evals = 0;
  bool tolerance_met = true;

  SmearValue& operator+=(const SmearValue& o);
  SmearValue scaled(cplx s) const;
};
SmearValue operator+(SmearValue a, const SmearValue& b);
SmearValue operator-(SmearValue a, const SmearValue& b);
// Product with first-order error propagation.
SmearValue product(const SmearValue& a, const SmearValue& b);

using Fn1 = std::function<cplx(double)>;
using FnN = std::function<cplx(const double*)>;

// Adaptive Gauss-Kronrod (10/21) on [a, b]; the interval is first split into
// `pieces` equal parts.
SmearValue integrate_1d(const Fn1& g, double a, double b, const QuadSpec& spec, int pieces = 1);

// Tensorized adaptive quadrature over the box [lo, hi] (n <= 4). `pieces`
// optionally gives the initial split per axis.
SmearValue integrate_nd(const FnN& g, const std::vector<double>& lo, const std::vector<double>& hi,
                        const QuadSpec& spec, const std::vector<int>& pieces = {});

// PV of g(u)/(u-u0) over [lo, hi]: symmetric fold around u0 plus the smooth
// remainder.
SmearValue pv_simple(const Fn1& g, double u0, double lo, double hi, const QuadSpec& spec);

struct FinitePartReport {
  SmearValue taylor;      // Taylor subtraction with boundary compensation
  SmearValue pole_deriv;  // d/du0 of pv_simple, central difference
  SmearValue result;      // taylor, err_est inflated by the disagreement
};
// Hadamard finite part of g(u)/(u-u0)^2 over [lo, hi].
FinitePartReport fp_double_report(const Fn1& g, double u0, double lo, double hi, const QuadSpec& spec);
SmearValue fp_double(const Fn1& g, double u0, double lo, double hi, const QuadSpec& spec);

// Integral of g(k) e^{i t theta(k)} over a box; the initial subdivision per
// axis is scaled with t * max|d theta/dk_a| (estimated on a coarse grid).
SmearValue oscillatory_integrate(const FnN& g, const std::function<double(const double*)>& theta, double t,
                                 const std::vector<double>& lo, const std::vector<double>& hi,
                                 const QuadSpec& spec);

// Number of initial pieces needed to resolve `phase_span` radians.
int oscillation_pieces(double phase_span);

}  // namespace dipole
