#pragma once

#include <vector>

#include "dipole/dist.hpp"

namespace dipole {

// Large-t targets of chi^d_t(a,k)/(k^2-m^2)^power.
//   power 2: in -> i pi (delta'+ - delta'-), loc -> FP, out -> -i pi (delta'+ - delta'-)
//   power 1: in -> -i pi (delta+ - delta-), loc -> PV, out -> +i pi (delta+ - delta-)
// The power-1 signs follow from the power-2 table through d/d(m^2), since
// d/d(m^2) delta = -delta' and d/d(m^2) PV = FP.
struct LimitTarget {
  int pole_power = 2;
  Channel channel = Channel::Out;
  double mass = 1.0;
  DistExpr target_expr;

  static LimitTarget make(int power, Channel channel, double mass);
  // The power-1 table with the in/out signs copied verbatim from the power-2
  // table; kept so reports can quote the fitted constant against it.
  static DistExpr analogy_expr(int power, Channel channel, double mass);
};

struct TGrid {
  std::vector<double> values{5, 10, 20, 40, 80};
  bool ratio_fit = false;
  void validate() const;
};

struct LimitOptions {
  double tol_final = 1e-2;
  double min_ratio = 4.0;
  Cutoff cutoff;  // eps of chi^d_t; defaults to m^2/2 when eps <= 0
  bool strict = false;  // throw NonDecaying instead of only flagging
  LimitOptions() { cutoff.eps = -1.0; }
};

SmearValue finite_t_value(int power, Channel channel, double t, const WavePacket& packet, const QuadSpec& spec,
                          double mass = 1.0, Cutoff cutoff = Cutoff::standard(1.0));

struct LimitReport {
  int power = 2;
  Channel channel = Channel::Out;
  std::vector<double> t;
  std::vector<cplx> values;
  std::vector<double> err_est;
  cplx target{0.0};
  double target_err = 0.0;
  std::vector<double> deviations;      // |v(t) - target|
  std::vector<double> rel_deviations;  // deviations / |target|
  std::vector<double> decay_ratios;    // dev(t_i) / dev(t_{i+1})
  std::vector<bool> ratio_ok;
  double noise_floor = 0.0;
  bool monotone_tail = true;
  bool non_decaying = false;
  cplx analogy_constant{0.0};  // least-squares c with v(t_last) ~ c <analogy target>
  bool has_extrapolation = false;
  cplx extrapolated{0.0};  // Aitken estimate from the last three values, diagnostic
  double tol_final = 1e-2, min_ratio = 4.0;
  bool pass = false;
};

LimitReport limit_and_compare(const LimitTarget& target, const TGrid& grid, const WavePacket& packet,
                              const QuadSpec& spec, const LimitOptions& opts = {});

}  // namespace dipole
