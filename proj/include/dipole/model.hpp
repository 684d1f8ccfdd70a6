#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dipole/dist.hpp"

namespace dipole {

struct PoissonGenerator {
  double lambda = 1.0;
  double a = 1.0;
};

struct MomentModel {
  double mass = 1.0;
  int dim = 2;
  double c = 1.0;                   // -psi''(0)
  std::map<int, double> cumulants;  // n -> c_n, n >= 2; c_2 defaults to c
  std::optional<PoissonGenerator> generator;
  double one_point = 0.0;
  // Extra factor on the two-point Wightman term.
  double w2_normalization = 1.0;

  // psi(s) = lambda (e^{i a s} - 1): c_n = lambda a^n, c = lambda a^2.
  static MomentModel poisson(double mass, int dim, double lambda, double a, int n_max);
  void validate() const;
  double cumulant(int n) const;
  double c_tilde(int n) const;  // (2 pi)^{(d(n-2)-2)/2} c_n
  MomentModel scaled_cumulants(double factor) const;
};

using Block = std::vector<int>;
using Partition = std::vector<Block>;

long long bell_number(int n);
// All set partitions of {0..n-1}; blocks ascending, partitions in canonical
// restricted-growth-string order.
std::vector<Partition> set_partitions(int n);
// Same set, built by inserting element k into every block of each partition
// of {0..k-1} or opening a new block. Returned unsorted.
std::vector<Partition> set_partitions_recursive(int n);
// Perfect matchings of the given elements (empty list gives one empty matching).
std::vector<Partition> pair_partitions(const std::vector<int>& elements);
long long double_factorial_odd(int n);  // (n-1)!! for even n, 0 for odd n

// (-Laplace + m^2)^{-order}(x) in d = x.size() dimensions.
double euclid_kernel(int order, const std::vector<double>& x, double mass);
double euclid_kernel(int order, const std::vector<double>& x, const MomentModel& model);

struct SchwingerValue {
  double value = 0.0;
  double err_est = 0.0;
  long n_evals = 0;
};
SchwingerValue schwinger_truncated(int n, const std::vector<std::vector<double>>& points, const MomentModel& model,
                                   const QuadSpec& spec);

DistExpr wightman_truncated(int n, const MomentModel& model);

// Evaluates a truncated function on the arguments listed in the block (in
// ascending order).
using TruncatedEvaluator = std::function<SmearValue(const Block&)>;
struct AssemblyReport {
  SmearValue value;
  int partitions_total = 0;
  int partitions_contributing = 0;
  std::vector<SmearValue> per_partition;
};
AssemblyReport assemble_moments(int n, const TruncatedEvaluator& truncated, const MomentModel& model);
// Packet-level convenience: truncated Wightman smears on sub-tuples.
AssemblyReport assemble_wightman_moments(int n, const MomentModel& model, const std::vector<WavePacket>& packets,
                                         const QuadSpec& spec, const SmearOptions& opts = {});

}  // namespace dipole
