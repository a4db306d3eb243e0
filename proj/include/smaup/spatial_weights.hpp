#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace smaup {

namespace detail {
struct SpectrumCache;
}

/// Contiguity structure over n areas with one weight per neighbor.
///
/// Neighbor lists are sorted ascending, symmetric, and free of self loops.
/// In standardized mode every nonempty weight row is 1/degree (rows sum to
/// one); in raw mode every weight is 1. Immutable once built and safe to
/// share between threads, including the lazily computed spectrum.
class SpatialWeights {
 public:
  /// Builds from neighbor lists. Lists are sorted and de-duplicated; throws
  /// InputError on self loops, out-of-range ids, or asymmetry.
  static SpatialWeights from_neighbors(std::vector<std::vector<int>> neighbors,
                                       bool standardize = true);

  std::size_t n() const noexcept { return neighbors_.size(); }
  std::span<const int> neighbors(std::size_t i) const { return neighbors_[i]; }
  std::span<const double> weights(std::size_t i) const { return weights_[i]; }
  const std::vector<std::vector<int>>& neighbor_lists() const noexcept { return neighbors_; }
  const std::vector<std::vector<double>>& weight_lists() const noexcept { return weights_; }
  bool standardized() const noexcept { return standardized_; }

  /// Number of undirected edges.
  std::size_t edge_count() const noexcept { return edges_; }

  /// Structural fingerprint; AreaVariable uses it to tie values to weights.
  std::uint64_t id() const noexcept { return id_; }

  /// out = W * x.
  void lag(std::span<const double> x, std::span<double> out) const;
  std::vector<double> lag(std::span<const double> x) const;

  /// Eigenvalues of W in ascending order. Real because W is similar to a
  /// symmetric matrix in both modes. Computed once, on first use.
  const std::vector<double>& eigenvalues() const;

  /// Same structure with the other weighting mode.
  SpatialWeights with_standardization(bool standardize) const;

  friend bool operator==(const SpatialWeights& a, const SpatialWeights& b) {
    return a.standardized_ == b.standardized_ && a.neighbors_ == b.neighbors_ &&
           a.weights_ == b.weights_;
  }

 private:
  SpatialWeights() = default;

  std::vector<std::vector<int>> neighbors_;
  std::vector<std::vector<double>> weights_;
  bool standardized_ = true;
  std::size_t edges_ = 0;
  std::uint64_t id_ = 0;
  std::shared_ptr<detail::SpectrumCache> spectrum_;
};

/// rows x cols grid with rook contiguity, cell index = row * cols + col.
SpatialWeights build_lattice_rook(std::size_t rows, std::size_t cols, bool standardize = true);

struct AdjacencyLoad {
  SpatialWeights weights;
  /// Reciprocal edges that were missing from the input and added.
  std::size_t repaired_edges = 0;
};

/// Parses `id: n1 n2 ...` lines. Ids must run 0, 1, 2, ... in order. `#`
/// starts a comment. Missing reciprocal edges are added and counted.
AdjacencyLoad from_adjacency_text(std::string_view content, bool standardize = true);

/// Writes the adjacency-list text form read by from_adjacency_text.
std::string to_adjacency_text(const SpatialWeights& w);

/// Rook contiguity between the Polygon/MultiPolygon features of a GeoJSON
/// FeatureCollection. Two features are neighbors iff they share a boundary
/// segment; vertices are matched after quantization to 1e-9.
SpatialWeights from_geojson(std::string_view content, bool standardize = true);

bool is_connected(const SpatialWeights& w);

}  // namespace smaup
