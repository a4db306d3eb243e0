#include <algorithm>
#include <numeric>
#include <queue>
#include <set>

#include "doctest.h"
#include "smaup/error.hpp"
#include "smaup/regionalize.hpp"
#include "smaup/sar.hpp"

using namespace smaup;

namespace {

// Independent partition check: every label used, each region connected by
// BFS restricted to its own areas.
bool partition_ok(const SpatialWeights& w, const Regionalization& r) {
  if (r.assignment.size() != w.n()) return false;
  std::vector<std::vector<int>> members(static_cast<std::size_t>(r.k));
  for (std::size_t i = 0; i < w.n(); ++i) {
    const int label = r.assignment[i];
    if (label < 0 || label >= r.k) return false;
    members[static_cast<std::size_t>(label)].push_back(static_cast<int>(i));
  }
  for (std::size_t label = 0; label < members.size(); ++label) {
    const auto& m = members[label];
    if (m.empty()) return false;
    std::set<int> seen{m.front()};
    std::queue<int> q;
    q.push(m.front());
    while (!q.empty()) {
      const int a = q.front();
      q.pop();
      for (int b : w.neighbors(static_cast<std::size_t>(a)))
        if (r.assignment[static_cast<std::size_t>(b)] == static_cast<int>(label) && seen.insert(b).second) q.push(b);
    }
    if (seen.size() != m.size()) return false;
  }
  return true;
}

}  // namespace

TEST_SUITE("regionalize") {
  TEST_CASE("k = n gives singletons") {
    const auto w = build_lattice_rook(4, 5);
    const auto r = random_regions(w, 20, 3);
    std::vector<int> labels = r.assignment;
    std::sort(labels.begin(), labels.end());
    for (int i = 0; i < 20; ++i) CHECK(labels[static_cast<std::size_t>(i)] == i);
  }

  TEST_CASE("k = 1 gives one region") {
    const auto w = build_lattice_rook(4, 5);
    const auto r = random_regions(w, 1, 3);
    for (int label : r.assignment) CHECK(label == 0);
  }

  TEST_CASE("property: 1000 seeds on 10x10 with k = 7 give valid partitions") {
    const auto w = build_lattice_rook(10, 10);
    for (std::uint64_t seed = 0; seed < 1000; ++seed) {
      const auto r = random_regions(w, 7, seed);
      REQUIRE(partition_ok(w, r));
      REQUIRE_NOTHROW(r.validate(w));
    }
  }

  TEST_CASE("property: partitions stay valid across k and irregular graphs") {
    // A path with a side branch and a cycle.
    const auto g = SpatialWeights::from_neighbors({{1}, {0, 2, 5}, {1, 3}, {2, 4}, {3, 5}, {4, 1, 6}, {5}});
    for (int k = 1; k <= 7; ++k)
      for (std::uint64_t seed = 0; seed < 100; ++seed) REQUIRE(partition_ok(g, random_regions(g, k, seed)));
    const auto w = build_lattice_rook(7, 13);
    for (int k : {2, 9, 45, 90, 91})
      for (std::uint64_t seed = 0; seed < 50; ++seed) REQUIRE(partition_ok(w, random_regions(w, k, seed)));
  }

  TEST_CASE("same seed, same partition; different seeds differ") {
    const auto w = build_lattice_rook(10, 10);
    CHECK(random_regions(w, 12, 5).assignment == random_regions(w, 12, 5).assignment);
    std::set<std::vector<int>> distinct;
    for (std::uint64_t seed = 0; seed < 30; ++seed) distinct.insert(random_regions(w, 12, seed).assignment);
    CHECK(distinct.size() == 30);
  }

  TEST_CASE("invalid k and disconnected graphs") {
    const auto w = build_lattice_rook(3, 3);
    CHECK_THROWS_AS(random_regions(w, 0, 1), InputError);
    CHECK_THROWS_AS(random_regions(w, 10, 1), InputError);
    CHECK_THROWS_AS(random_regions(SpatialWeights::from_neighbors({{1}, {0}, {3}, {2}}), 2, 1), InputError);
  }

  TEST_CASE("validate catches broken partitions") {
    const auto w = build_lattice_rook(1, 4);
    CHECK_THROWS_AS((Regionalization{{0, 1, 0, 1}, 2}).validate(w), InputError);  // not contiguous
    CHECK_THROWS_AS((Regionalization{{0, 0, 0, 0}, 2}).validate(w), InputError);  // empty region
    CHECK_THROWS_AS((Regionalization{{0, 0, 3, 1}, 2}).validate(w), InputError);  // label out of range
    CHECK_THROWS_AS((Regionalization{{0, 0, 1}, 2}).validate(w), InputError);     // wrong length
    CHECK_NOTHROW((Regionalization{{0, 0, 1, 1}, 2}).validate(w));
    CHECK((Regionalization{{0, 0, 1, 1}, 2}).region_sizes() == std::vector<int>{2, 2});
  }

  TEST_CASE("aggregate_mean examples") {
    const std::vector<double> y{1, 2, 3, 4};
    const auto agg = aggregate_mean(y, {{0, 0, 1, 1}, 2});
    CHECK(agg.region_means == std::vector<double>{1.5, 3.5});
    CHECK(agg.region_sizes == std::vector<int>{2, 2});
    const std::vector<double> c(9, 2.25);
    for (double m : aggregate_mean(c, random_regions(build_lattice_rook(3, 3), 4, 7)).region_means) CHECK(m == 2.25);
    CHECK_THROWS_AS(aggregate_mean(std::vector<double>{1, 2}, {{0, 0, 1}, 2}), InputError);
  }

  TEST_CASE("k = n aggregation permutes y") {
    const auto w = build_lattice_rook(3, 4);
    const auto y = generate_sar(w, {0.2, 3});
    auto means = aggregate_mean(y.values(), random_regions(w, 12, 8)).region_means;
    std::vector<double> vals(y.values().begin(), y.values().end());
    std::sort(means.begin(), means.end());
    std::sort(vals.begin(), vals.end());
    CHECK(means == vals);
  }

  TEST_CASE("equal-size regions preserve the overall mean") {
    const std::vector<double> y{0.5, 1.5, 4.0, 2.0, 7.0, 1.0};
    const auto agg = aggregate_mean(y, {{0, 0, 1, 1, 2, 2}, 3});
    const double a = std::accumulate(y.begin(), y.end(), 0.0) / 6.0;
    const double b = std::accumulate(agg.region_means.begin(), agg.region_means.end(), 0.0) / 3.0;
    CHECK(a == doctest::Approx(b).epsilon(1e-15));
  }

  TEST_CASE("relabelling permutes the region means") {
    const std::vector<double> y{1, 2, 3, 4, 5, 6};
    const auto a = aggregate_mean(y, {{0, 0, 1, 1, 2, 2}, 3});
    const auto b = aggregate_mean(y, {{2, 2, 0, 0, 1, 1}, 3});
    CHECK(b.region_means == std::vector<double>{a.region_means[1], a.region_means[2], a.region_means[0]});
  }
}
