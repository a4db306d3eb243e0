#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "smaup/rng.hpp"
#include "smaup/spatial_weights.hpp"

namespace smaup {

/// Partition of n areas into k contiguous, nonempty regions.
struct Regionalization {
  std::vector<int> assignment;  // area -> region label in [0, k)
  int k = 0;

  /// Throws InputError on any violated invariant: wrong length, label out
  /// of range, empty region, or a region whose areas are not connected.
  void validate(const SpatialWeights& w) const;

  std::vector<int> region_sizes() const;
};

/// Seed-based region growing: k distinct seed areas drawn uniformly, then
/// repeatedly a uniformly chosen region with a nonempty frontier absorbs a
/// uniformly chosen unassigned neighbor, until every area is assigned.
Regionalization random_regions(const SpatialWeights& w, int k, std::uint64_t seed);
Regionalization random_regions(const SpatialWeights& w, int k, Rng& rng);

struct AggregatedVariable {
  std::vector<double> region_means;
  std::vector<int> region_sizes;
};

/// Unweighted mean of y within each region. Throws InputError on a length
/// mismatch or a label outside [0, k).
AggregatedVariable aggregate_mean(std::span<const double> y, const Regionalization& r);

}  // namespace smaup
