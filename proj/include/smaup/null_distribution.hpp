#pragma once

#include <cstdint>
#include <vector>

namespace smaup {

/// Simulated values of M under H0 for one (N, rho) cell.
struct NullDistribution {
  int n = 0;
  double rho = 0.0;
  std::vector<double> values;  // ascending
  int replicates = 0;
  int r_aggregations = 30;
  std::uint64_t master_seed = 0;

  /// Throws InputError unless values are sorted, finite, and replicates
  /// equals values.size().
  void validate() const;
};

}  // namespace smaup
