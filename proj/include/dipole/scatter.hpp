#pragma once

#include <optional>
#include <vector>

#include "dipole/asymlim.hpp"
#include "dipole/model.hpp"

namespace dipole {

struct ChannelAssignment {
  std::vector<Channel> channels;
  std::vector<double> times;  // empty: all zero
  void validate(int n) const;
  double time(int l) const { return times.empty() ? 0.0 : times[l]; }
};

// Conservation delta replaced by a normalized Gaussian of width sigma, with
// sigma halved per level and Richardson extrapolation in sigma^2.
struct RegSpec {
  double sigma0 = 0.1;
  int levels = 4;
  void validate() const;
};

struct RegReport {
  std::vector<double> sigmas;
  std::vector<SmearValue> levels;
  std::vector<cplx> extrapolants;  // highest-order Richardson estimate using levels 0..k
  std::vector<bool> contraction_ok;
  SmearValue value;
  bool converged = true;
};

// Throws RegularizationNotConverged after three consecutive failed
// contraction checks.
RegReport mollified_smear(const DistExpr& e, const std::vector<WavePacket>& packets, const QuadSpec& spec,
                          const RegSpec& reg = {});

// Wightman function with argument l multiplied by the channel multiplier at
// time t_l (ChiDT by default; ChiT or HaagRuelleOnly for the non-dipole case).
SmearValue finite_time_wightman(int n, const ChannelAssignment& assign, const MomentModel& model,
                                const std::vector<WavePacket>& packets, const QuadSpec& spec,
                                MultKind kind = MultKind::ChiDT, double cutoff_eps = -1.0,
                                const SmearOptions& opts = {});

// Term j of the returned expression replaces the FP factor of variable j by
// the large-t target of its channel. Terms whose FP variable is loc keep the
// Wightman structure; the others carry only shell factors.
DistExpr form_factor_expr(int n, const std::vector<Channel>& channels, const MomentModel& model);

struct FormFactorReport {
  SmearValue value;
  SmearValue exact_part;      // loc terms, conservation delta eliminated
  SmearValue mollified_part;  // shell-only terms
  std::optional<RegReport> regularization;
};
FormFactorReport form_factor(int n, const ChannelAssignment& assign, const MomentModel& model,
                             const std::vector<WavePacket>& packets, const QuadSpec& spec, const RegSpec& reg = {});

// 2 pi i c~_n prod delta'+(k_l) delta(sum_{l<=r} k_l - sum_{l>r} k_l)
DistExpr smatrix_expr(int n, int r, const MomentModel& model);
RegReport smatrix_truncated(int n, int r, const MomentModel& model, const std::vector<WavePacket>& packets,
                            const QuadSpec& spec, const RegSpec& reg = {});

struct LimitPathReport {
  std::vector<double> t;
  std::vector<SmearValue> values;
  SmearValue limit;  // value on the last grid point
  std::vector<double> increments;
};
// Wightman function with channels (in^r, out^{n-r}) at equal times along the
// grid; the in-packets are reflected k -> -k so positive-energy in-states
// pair with the negative-energy shell factors.
LimitPathReport smatrix_limit_path(int n, int r, const MomentModel& model, const std::vector<WavePacket>& packets,
                                   const TGrid& grid, const QuadSpec& spec, MultKind kind = MultKind::ChiDT);

struct DivergenceReport {
  MultKind kind = MultKind::HaagRuelleOnly;
  std::vector<Channel> channels;
  std::vector<double> t;
  std::vector<SmearValue> values;
  double slope = 0.0;      // least-squares slope of log|v| against log t
  double intercept = 0.0;
  double max_over_min = 1.0;
  bool growing = false;    // slope >= min_slope
  bool bounded = false;    // max/min <= max_ratio
  double min_slope = 0.8, max_ratio = 1.2;
};
DivergenceReport divergence_demo(int n, const MomentModel& model, const std::vector<WavePacket>& packets,
                                 const std::vector<Channel>& channels, const TGrid& grid, MultKind kind,
                                 const QuadSpec& spec);

}  // namespace dipole
