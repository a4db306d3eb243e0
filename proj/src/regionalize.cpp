#include "smaup/regionalize.hpp"

#include <queue>
#include <string>
#include <unordered_set>

#include "smaup/error.hpp"

namespace smaup {

std::vector<int> Regionalization::region_sizes() const {
  std::vector<int> sizes(static_cast<std::size_t>(std::max(k, 0)), 0);
  for (int label : assignment)
    if (label >= 0 && label < k) ++sizes[static_cast<std::size_t>(label)];
  return sizes;
}

void Regionalization::validate(const SpatialWeights& w) const {
  const std::size_t n = w.n();
  if (assignment.size() != n)
    throw InputError("partition has " + std::to_string(assignment.size()) + " entries for " +
                     std::to_string(n) + " areas");
  if (k < 1 || static_cast<std::size_t>(k) > n) throw InputError("partition has invalid k");
  for (std::size_t i = 0; i < n; ++i)
    if (assignment[i] < 0 || assignment[i] >= k)
      throw InputError("area " + std::to_string(i) + " has label outside [0, k)");
  const auto sizes = region_sizes();
  for (int r = 0; r < k; ++r)
    if (sizes[static_cast<std::size_t>(r)] == 0) throw InputError("region " + std::to_string(r) + " is empty");

  // One BFS per region, restricted to its own areas.
  std::vector<char> seen(n, 0);
  std::vector<char> region_done(static_cast<std::size_t>(k), 0);
  for (std::size_t start = 0; start < n; ++start) {
    const int label = assignment[start];
    if (region_done[static_cast<std::size_t>(label)]) continue;
    region_done[static_cast<std::size_t>(label)] = 1;
    int reached = 1;
    std::queue<std::size_t> q;
    q.push(start);
    seen[start] = 1;
    while (!q.empty()) {
      const std::size_t i = q.front();
      q.pop();
      for (int j : w.neighbors(i)) {
        const auto sj = static_cast<std::size_t>(j);
        if (!seen[sj] && assignment[sj] == label) {
          seen[sj] = 1;
          ++reached;
          q.push(sj);
        }
      }
    }
    if (reached != sizes[static_cast<std::size_t>(label)])
      throw InputError("region " + std::to_string(label) + " is not contiguous");
  }
}

Regionalization random_regions(const SpatialWeights& w, int k, std::uint64_t seed) {
  Rng rng(seed);
  return random_regions(w, k, rng);
}

Regionalization random_regions(const SpatialWeights& w, int k, Rng& rng) {
  const std::size_t n = w.n();
  if (k < 1 || static_cast<std::size_t>(k) > n)
    throw InputError("k must lie in [1, " + std::to_string(n) + "], got " + std::to_string(k));
  if (!is_connected(w)) throw InputError("contiguous regions are impossible on a disconnected graph");

  const auto uk = static_cast<std::size_t>(k);
  Regionalization out;
  out.k = k;
  out.assignment.assign(n, -1);

  // Partial Fisher-Yates for k distinct seeds.
  std::vector<int> pool(n);
  for (std::size_t i = 0; i < n; ++i) pool[i] = static_cast<int>(i);
  for (std::size_t r = 0; r < uk; ++r) {
    const std::size_t pick = r + rng.below(n - r);
    std::swap(pool[r], pool[pick]);
    out.assignment[static_cast<std::size_t>(pool[r])] = static_cast<int>(r);
  }
  if (uk == n) return out;

  // Frontier lists hold distinct candidates per region; entries that another
  // region has since claimed are dropped lazily when drawn.
  std::vector<std::vector<int>> frontier(uk);
  std::vector<std::unordered_set<int>> in_frontier(uk);
  auto extend = [&](std::size_t region, std::size_t area) {
    for (int j : w.neighbors(area))
      if (out.assignment[static_cast<std::size_t>(j)] < 0 && in_frontier[region].insert(j).second)
        frontier[region].push_back(j);
  };
  for (std::size_t r = 0; r < uk; ++r) extend(r, static_cast<std::size_t>(pool[r]));

  std::vector<std::size_t> active;
  for (std::size_t r = 0; r < uk; ++r)
    if (!frontier[r].empty()) active.push_back(r);

  std::size_t unassigned = n - uk;
  while (unassigned > 0 && !active.empty()) {
    const std::size_t slot = rng.below(active.size());
    const std::size_t region = active[slot];
    auto& cand = frontier[region];
    int chosen = -1;
    while (!cand.empty()) {
      const std::size_t idx = rng.below(cand.size());
      const int area = cand[idx];
      cand[idx] = cand.back();
      cand.pop_back();
      in_frontier[region].erase(area);
      if (out.assignment[static_cast<std::size_t>(area)] < 0) {
        chosen = area;
        break;
      }
    }
    if (chosen >= 0) {
      out.assignment[static_cast<std::size_t>(chosen)] = static_cast<int>(region);
      --unassigned;
      extend(region, static_cast<std::size_t>(chosen));
    }
    if (cand.empty()) {
      active[slot] = active.back();
      active.pop_back();
    }
  }

  // Growth on a connected graph assigns everything; anything left is
  // attached to an adjacent region.
  while (unassigned > 0) {
    bool progress = false;
    for (std::size_t i = 0; i < n; ++i) {
      if (out.assignment[i] >= 0) continue;
      std::vector<int> labels;
      for (int j : w.neighbors(i))
        if (out.assignment[static_cast<std::size_t>(j)] >= 0) labels.push_back(out.assignment[static_cast<std::size_t>(j)]);
      if (labels.empty()) continue;
      out.assignment[i] = labels[rng.below(labels.size())];
      --unassigned;
      progress = true;
    }
    if (!progress) throw InputError("contiguous regions are impossible: stranded areas");
  }
  out.validate(w);
  return out;
}

AggregatedVariable aggregate_mean(std::span<const double> y, const Regionalization& r) {
  if (y.size() != r.assignment.size())
    throw InputError("aggregate_mean: " + std::to_string(y.size()) + " values for " +
                     std::to_string(r.assignment.size()) + " assignments");
  if (r.k < 1) throw InputError("aggregate_mean: corrupt partition (k < 1)");
  const auto uk = static_cast<std::size_t>(r.k);
  AggregatedVariable out;
  out.region_means.assign(uk, 0.0);
  out.region_sizes.assign(uk, 0);
  for (std::size_t i = 0; i < y.size(); ++i) {
    const int label = r.assignment[i];
    if (label < 0 || label >= r.k)
      throw InputError("aggregate_mean: corrupt partition, area " + std::to_string(i) + " has label " +
                       std::to_string(label));
    out.region_means[static_cast<std::size_t>(label)] += y[i];
    ++out.region_sizes[static_cast<std::size_t>(label)];
  }
  for (std::size_t j = 0; j < uk; ++j) {
    if (out.region_sizes[j] == 0) throw InputError("aggregate_mean: corrupt partition, region " + std::to_string(j) + " is empty");
    out.region_means[j] /= out.region_sizes[j];
  }
  return out;
}

}  // namespace smaup
