#include <cmath>
#include <numeric>
#include <queue>
#include <string>

#include "doctest.h"
#include "smaup/error.hpp"
#include "smaup/io.hpp"
#include "smaup/spatial_weights.hpp"

using namespace smaup;

namespace {

// Shared grid edges counted directly: horizontal plus vertical.
std::size_t grid_edges(std::size_t rows, std::size_t cols) { return rows * (cols - 1) + cols * (rows - 1); }

std::string square(double x, double y) {
  auto pt = [](double a, double b) { return "[" + std::to_string(a) + "," + std::to_string(b) + "]"; };
  return R"({"type":"Feature","properties":{},"geometry":{"type":"Polygon","coordinates":[[)" + pt(x, y) + "," +
         pt(x + 1, y) + "," + pt(x + 1, y + 1) + "," + pt(x, y + 1) + "," + pt(x, y) + "]]}}";
}

std::string grid_geojson(int rows, int cols) {
  std::string s = R"({"type":"FeatureCollection","features":[)";
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) {
      if (r || c) s += ",";
      s += square(c, r);
    }
  return s + "]}";
}

}  // namespace

TEST_SUITE("spatial_weights") {
  TEST_CASE("1x2 lattice") {
    const auto w = build_lattice_rook(1, 2);
    REQUIRE(w.n() == 2);
    CHECK(w.neighbors(0).size() == 1);
    CHECK(w.neighbors(0)[0] == 1);
    CHECK(w.weights(0)[0] == 1.0);
    CHECK(w.neighbors(1)[0] == 0);
  }

  TEST_CASE("3x3 lattice centre and corners") {
    const auto w = build_lattice_rook(3, 3);
    CHECK(w.neighbors(4).size() == 4);
    for (double v : w.weights(4)) CHECK(v == 0.25);
    for (std::size_t corner : {0u, 2u, 6u, 8u}) {
      CHECK(w.neighbors(corner).size() == 2);
      for (double v : w.weights(corner)) CHECK(v == 0.5);
    }
    CHECK(w.edge_count() == 12);
    CHECK(is_connected(w));
  }

  TEST_CASE("edge count matches enumeration") {
    for (auto [r, c] : {std::pair{30u, 30u}, {1u, 7u}, {4u, 9u}, {13u, 2u}}) {
      const auto w = build_lattice_rook(r, c);
      CHECK(w.edge_count() == grid_edges(r, c));
    }
    CHECK(build_lattice_rook(30, 30).edge_count() == 1740);
  }

  TEST_CASE("standardized rows sum to one, raw weights are one") {
    const auto w = build_lattice_rook(7, 5);
    const auto raw = w.with_standardization(false);
    for (std::size_t i = 0; i < w.n(); ++i) {
      const auto row = w.weights(i);
      CHECK(std::accumulate(row.begin(), row.end(), 0.0) == doctest::Approx(1.0).epsilon(1e-12));
      for (double v : raw.weights(i)) CHECK(v == 1.0);
    }
    CHECK_FALSE(raw.standardized());
    CHECK(raw.with_standardization(true) == w);
  }

  TEST_CASE("invariants: symmetric, no self loops, in range") {
    const auto w = build_lattice_rook(6, 8);
    for (std::size_t i = 0; i < w.n(); ++i)
      for (int j : w.neighbors(i)) {
        CHECK(j != static_cast<int>(i));
        CHECK(j >= 0);
        CHECK(j < static_cast<int>(w.n()));
        const auto back = w.neighbors(static_cast<std::size_t>(j));
        CHECK(std::find(back.begin(), back.end(), static_cast<int>(i)) != back.end());
      }
  }

  TEST_CASE("from_neighbors rejects bad input") {
    CHECK_THROWS_AS(SpatialWeights::from_neighbors({{0}}), InputError);
    CHECK_THROWS_AS(SpatialWeights::from_neighbors({{1}, {}}), InputError);
    CHECK_THROWS_AS(SpatialWeights::from_neighbors({{5}, {0}}), InputError);
    CHECK_THROWS_AS(build_lattice_rook(0, 3), InputError);
  }

  TEST_CASE("lag against a direct product") {
    const auto w = build_lattice_rook(3, 4);
    std::vector<double> x(w.n());
    std::iota(x.begin(), x.end(), 1.0);
    const auto out = w.lag(x);
    for (std::size_t i = 0; i < w.n(); ++i) {
      double expect = 0.0;
      for (std::size_t t = 0; t < w.neighbors(i).size(); ++t)
        expect += w.weights(i)[t] * x[static_cast<std::size_t>(w.neighbors(i)[t])];
      CHECK(out[i] == doctest::Approx(expect));
    }
  }

  TEST_CASE("eigenvalues: row-standardized spectrum lies in [-1, 1] with max 1") {
    const auto w = build_lattice_rook(5, 6);
    const auto& ev = w.eigenvalues();
    REQUIRE(ev.size() == 30);
    CHECK(std::is_sorted(ev.begin(), ev.end()));
    CHECK(ev.back() == doctest::Approx(1.0));
    CHECK(ev.front() >= -1.0 - 1e-12);
    // Bipartite grid: spectrum symmetric about zero.
    CHECK(ev.front() == doctest::Approx(-1.0));
  }

  TEST_CASE("adjacency text: two areas and a path") {
    const auto two = from_adjacency_text("0: 1\n1: 0");
    CHECK(two.weights == build_lattice_rook(1, 2));
    CHECK(two.repaired_edges == 0);
    const auto path = from_adjacency_text("0: 1\n1: 0 2\n2: 1\n");
    CHECK(path.weights.weights(1)[0] == 0.5);
    CHECK(path.weights.weights(1)[1] == 0.5);
  }

  TEST_CASE("adjacency text round trip") {
    const auto w = build_lattice_rook(3, 3);
    CHECK(from_adjacency_text(to_adjacency_text(w)).weights == w);
    const auto raw = build_lattice_rook(4, 2, false);
    CHECK(from_adjacency_text(to_adjacency_text(raw), false).weights == raw);
  }

  TEST_CASE("adjacency text: comments, repair, errors") {
    const auto load = from_adjacency_text("# header\n0: 1 2  # trailing\n1:\n2: 0\n");
    CHECK(load.repaired_edges == 1);
    CHECK(load.weights.neighbors(1).size() == 1);
    try {
      from_adjacency_text("0: 1\n1: 1\n");
      FAIL("expected a parse error");
    } catch (const ParseError& e) {
      CHECK(e.line() == 2);
      CHECK(std::string(e.what()).find("line 2") != std::string::npos);
    }
    CHECK_THROWS_AS(from_adjacency_text(""), ParseError);
    CHECK_THROWS_AS(from_adjacency_text("0: 1\n2: 0\n"), ParseError);
    CHECK_THROWS_AS(from_adjacency_text("0: x\n"), ParseError);
    CHECK_THROWS_AS(from_adjacency_text("0: 3\n1: 0\n"), InputError);
  }

  TEST_CASE("geojson: two squares, 2x2 block, 5x5 grid") {
    const auto two = from_geojson(R"({"type":"FeatureCollection","features":[)" + square(0, 0) + "," + square(1, 0) + "]}");
    CHECK(two.n() == 2);
    CHECK(two.neighbors(0)[0] == 1);
    const auto block = from_geojson(grid_geojson(2, 2));
    CHECK(block.edge_count() == 4);
    for (std::size_t i = 0; i < 4; ++i) CHECK(block.neighbors(i).size() == 2);
    CHECK(from_geojson(grid_geojson(5, 5)) == build_lattice_rook(5, 5));
  }

  TEST_CASE("geojson: neighbours need an identical boundary segment") {
    // Left square has edge (1,0)-(1,1); right square has (1,0)-(1,0.5)-(1,1).
    const std::string left = square(0, 0);
    const std::string right =
        R"({"type":"Feature","geometry":{"type":"Polygon","coordinates":[[[1,0],[2,0],[2,1],[1,1],[1,0.5],[1,0]]]}})";
    const auto w = from_geojson(R"({"type":"FeatureCollection","features":[)" + left + "," + right + "]}");
    CHECK(w.n() == 2);
    CHECK(w.edge_count() == 0);
    // Tiny serialization jitter is absorbed by the quantization.
    const std::string jitter =
        R"({"type":"Feature","geometry":{"type":"Polygon","coordinates":[[[1.0000000000001,0],[2,0],[2,1],[1,1.0000000000001],[1.0000000000001,0]]]}})";
    CHECK(from_geojson(R"({"type":"FeatureCollection","features":[)" + left + "," + jitter + "]}").edge_count() == 1);
  }

  TEST_CASE("geojson errors") {
    CHECK_THROWS_AS(from_geojson("not json"), InputError);
    CHECK_THROWS_AS(from_geojson(R"({"type":"FeatureCollection","features":[)" + square(0, 0) + "]}"), InputError);
    CHECK_THROWS_AS(
        from_geojson(R"({"type":"FeatureCollection","features":[{"type":"Feature","geometry":{"type":"Point","coordinates":[0,0]}},)" +
                     square(0, 0) + "]}"),
        InputError);
  }

  TEST_CASE("connectivity") {
    CHECK(is_connected(build_lattice_rook(3, 3)));
    CHECK_FALSE(is_connected(SpatialWeights::from_neighbors({{1}, {0}, {3}, {2}})));
    // 30x30 lattice with one area's edges removed from the file.
    const auto w = build_lattice_rook(30, 30);
    std::string text;
    for (std::size_t i = 0; i < w.n(); ++i) {
      text += std::to_string(i) + ":";
      if (i != 435)
        for (int j : w.neighbors(i))
          if (j != 435) text += " " + std::to_string(j);
      text += "\n";
    }
    CHECK_FALSE(is_connected(from_adjacency_text(text).weights));
  }

  TEST_CASE("json round trip and validation") {
    for (bool standardize : {true, false}) {
      const auto w = build_lattice_rook(4, 3, standardize);
      CHECK(io::weights_from_json(io::json::parse(io::to_json(w).dump())) == w);
    }
    auto j = io::to_json(build_lattice_rook(2, 2));
    j["weights"][0][0] = 0.7;
    CHECK_THROWS_AS(io::weights_from_json(j), InputError);
    CHECK_THROWS_AS(io::weights_from_json(io::json::parse(R"({"n":2})")), InputError);
  }

  TEST_CASE("fingerprint distinguishes structures") {
    CHECK(build_lattice_rook(3, 3).id() == build_lattice_rook(3, 3).id());
    CHECK(build_lattice_rook(3, 3).id() != build_lattice_rook(1, 9).id());
    CHECK(build_lattice_rook(3, 3).id() != build_lattice_rook(3, 3, false).id());
  }
}
