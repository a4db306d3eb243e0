#include "smaup/spatial_weights.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <queue>
#include <set>
#include <utility>

#include "nlohmann/json.hpp"
#include "smaup/error.hpp"

namespace smaup {

namespace detail {
struct SpectrumCache {
  std::once_flag once;
  std::vector<double> values;
};
}  // namespace detail

namespace {

std::uint64_t fnv1a(std::uint64_t h, std::uint64_t v) {
  for (int b = 0; b < 8; ++b) {
    h ^= (v >> (8 * b)) & 0xffU;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

SpatialWeights SpatialWeights::from_neighbors(std::vector<std::vector<int>> neighbors,
                                              bool standardize) {
  const std::size_t n = neighbors.size();
  if (n == 0) throw InputError("spatial weights need at least one area");
  if (n > static_cast<std::size_t>(std::numeric_limits<int>::max()))
    throw InputError("too many areas");

  std::size_t directed = 0;
  for (std::size_t i = 0; i < n; ++i) {
    auto& row = neighbors[i];
    std::sort(row.begin(), row.end());
    row.erase(std::unique(row.begin(), row.end()), row.end());
    for (int j : row) {
      if (j < 0 || static_cast<std::size_t>(j) >= n)
        throw InputError("area " + std::to_string(i) + " has out-of-range neighbor " +
                         std::to_string(j));
      if (static_cast<std::size_t>(j) == i)
        throw InputError("area " + std::to_string(i) + " lists itself as a neighbor");
    }
    directed += row.size();
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (int j : neighbors[i]) {
      const auto& back = neighbors[static_cast<std::size_t>(j)];
      if (!std::binary_search(back.begin(), back.end(), static_cast<int>(i)))
        throw InputError("asymmetric adjacency: " + std::to_string(i) + " -> " +
                         std::to_string(j) + " has no reciprocal");
    }
  }

  SpatialWeights w;
  w.standardized_ = standardize;
  w.edges_ = directed / 2;
  w.weights_.resize(n);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  h = fnv1a(h, n);
  h = fnv1a(h, standardize ? 1 : 0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& row = neighbors[i];
    const double value = standardize && !row.empty() ? 1.0 / static_cast<double>(row.size()) : 1.0;
    w.weights_[i].assign(row.size(), value);
    h = fnv1a(h, row.size());
    for (int j : row) h = fnv1a(h, static_cast<std::uint64_t>(j));
  }
  w.id_ = h;
  w.neighbors_ = std::move(neighbors);
  w.spectrum_ = std::make_shared<detail::SpectrumCache>();
  return w;
}

void SpatialWeights::lag(std::span<const double> x, std::span<double> out) const {
  if (x.size() != n() || out.size() != n())
    throw InputError("spatial lag: vector length does not match weights");
  for (std::size_t i = 0; i < n(); ++i) {
    double s = 0.0;
    const auto& nb = neighbors_[i];
    const auto& wt = weights_[i];
    for (std::size_t e = 0; e < nb.size(); ++e) s += wt[e] * x[static_cast<std::size_t>(nb[e])];
    out[i] = s;
  }
}

std::vector<double> SpatialWeights::lag(std::span<const double> x) const {
  std::vector<double> out(n());
  lag(x, out);
  return out;
}

const std::vector<double>& SpatialWeights::eigenvalues() const {
  std::call_once(spectrum_->once, [this] {
    // W = D^-1 A is similar to D^-1/2 A D^-1/2; raw W = A is symmetric.
    const auto size = static_cast<Eigen::Index>(n());
    std::vector<double> scale(n(), 1.0);
    if (standardized_) {
      for (std::size_t i = 0; i < n(); ++i)
        scale[i] = neighbors_[i].empty() ? 0.0 : 1.0 / std::sqrt(static_cast<double>(neighbors_[i].size()));
    }
    Eigen::MatrixXd s = Eigen::MatrixXd::Zero(size, size);
    for (std::size_t i = 0; i < n(); ++i)
      for (int j : neighbors_[i])
        s(static_cast<Eigen::Index>(i), j) = scale[i] * scale[static_cast<std::size_t>(j)];
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(s, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) throw NumericalError("eigenvalue decomposition of W failed");
    const auto& ev = solver.eigenvalues();
    spectrum_->values.assign(ev.data(), ev.data() + ev.size());
  });
  return spectrum_->values;
}

SpatialWeights SpatialWeights::with_standardization(bool standardize) const {
  return from_neighbors(neighbors_, standardize);
}

SpatialWeights build_lattice_rook(std::size_t rows, std::size_t cols, bool standardize) {
  if (rows == 0 || cols == 0) throw InputError("lattice dimensions must be positive");
  if (rows > static_cast<std::size_t>(std::numeric_limits<int>::max()) / cols)
    throw InputError("lattice dimensions overflow");
  const std::size_t n = rows * cols;
  if (n < 2) throw InputError("lattice must have at least two cells");

  std::vector<std::vector<int>> nb(n);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      auto& row = nb[r * cols + c];
      if (r > 0) row.push_back(static_cast<int>((r - 1) * cols + c));
      if (c > 0) row.push_back(static_cast<int>(r * cols + c - 1));
      if (c + 1 < cols) row.push_back(static_cast<int>(r * cols + c + 1));
      if (r + 1 < rows) row.push_back(static_cast<int>((r + 1) * cols + c));
    }
  }
  return SpatialWeights::from_neighbors(std::move(nb), standardize);
}

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

long parse_id(std::string_view token, std::size_t line) {
  long value = 0;
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc() || ptr != token.data() + token.size() || value < 0)
    throw ParseError("invalid area id '" + std::string(token) + "'", line);
  return value;
}

}  // namespace

AdjacencyLoad from_adjacency_text(std::string_view content, bool standardize) {
  std::vector<std::vector<int>> nb;
  std::vector<std::size_t> line_of;
  std::size_t line_no = 0;
  while (!content.empty()) {
    const auto eol = content.find('\n');
    std::string_view line = content.substr(0, eol);
    content = eol == std::string_view::npos ? std::string_view{} : content.substr(eol + 1);
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    const auto colon = line.find(':');
    if (colon == std::string_view::npos) throw ParseError("expected '<id>: <neighbors>'", line_no);
    const long id = parse_id(trim(line.substr(0, colon)), line_no);
    if (static_cast<std::size_t>(id) != nb.size())
      throw ParseError("area ids must be consecutive from 0; expected " +
                           std::to_string(nb.size()) + ", found " + std::to_string(id),
                       line_no);
    std::vector<int> row;
    std::string_view rest = line.substr(colon + 1);
    while (!(rest = trim(rest)).empty()) {
      const auto sp = rest.find_first_of(" \t");
      const long j = parse_id(rest.substr(0, sp), line_no);
      if (j == id) throw ParseError("area " + std::to_string(id) + " lists itself as a neighbor", line_no);
      if (j > std::numeric_limits<int>::max()) throw ParseError("area id too large", line_no);
      row.push_back(static_cast<int>(j));
      rest = sp == std::string_view::npos ? std::string_view{} : rest.substr(sp);
    }
    nb.push_back(std::move(row));
    line_of.push_back(line_no);
  }
  if (nb.empty()) throw ParseError("adjacency file contains no areas");

  const std::size_t n = nb.size();
  for (std::size_t i = 0; i < n; ++i)
    for (int j : nb[i])
      if (static_cast<std::size_t>(j) >= n)
        throw ParseError("neighbor id " + std::to_string(j) + " is not a listed area", line_of[i]);

  for (auto& row : nb) {
    std::sort(row.begin(), row.end());
    row.erase(std::unique(row.begin(), row.end()), row.end());
  }
  std::size_t repaired = 0;
  std::vector<std::vector<int>> additions(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (int j : nb[i]) {
      const auto& back = nb[static_cast<std::size_t>(j)];
      if (!std::binary_search(back.begin(), back.end(), static_cast<int>(i))) {
        additions[static_cast<std::size_t>(j)].push_back(static_cast<int>(i));
        ++repaired;
      }
    }
  }
  for (std::size_t i = 0; i < n; ++i)
    nb[i].insert(nb[i].end(), additions[i].begin(), additions[i].end());

  return {SpatialWeights::from_neighbors(std::move(nb), standardize), repaired};
}

std::string to_adjacency_text(const SpatialWeights& w) {
  std::string out = "# rook adjacency, " + std::to_string(w.n()) + " areas\n";
  for (std::size_t i = 0; i < w.n(); ++i) {
    out += std::to_string(i) + ":";
    for (int j : w.neighbors(i)) {
      out += ' ';
      out += std::to_string(j);
    }
    out += '\n';
  }
  return out;
}

namespace {

using Vertex = std::pair<long long, long long>;
using Segment = std::pair<Vertex, Vertex>;

Vertex quantize(const nlohmann::json& point) {
  if (!point.is_array() || point.size() < 2 || !point[0].is_number() || !point[1].is_number())
    throw InputError("GeoJSON: invalid coordinate");
  auto q = [](double v) {
    if (!std::isfinite(v)) throw InputError("GeoJSON: non-finite coordinate");
    return std::llround(v * 1e9);
  };
  return {q(point[0].get<double>()), q(point[1].get<double>())};
}

void collect_polygon(const nlohmann::json& rings, std::vector<Segment>& out) {
  if (!rings.is_array() || rings.empty()) throw InputError("GeoJSON: polygon without rings");
  for (const auto& ring : rings) {
    if (!ring.is_array() || ring.size() < 4) throw InputError("GeoJSON: ring needs at least 4 positions");
    Vertex prev = quantize(ring[0]);
    for (std::size_t p = 1; p < ring.size(); ++p) {
      Vertex cur = quantize(ring[p]);
      if (cur != prev) out.emplace_back(std::min(prev, cur), std::max(prev, cur));
      prev = cur;
    }
  }
}

}  // namespace

SpatialWeights from_geojson(std::string_view content, bool standardize) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(content);
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError(std::string("GeoJSON: malformed JSON: ") + e.what());
  }
  if (!doc.is_object() || doc.value("type", "") != "FeatureCollection" || !doc.contains("features") ||
      !doc["features"].is_array())
    throw InputError("GeoJSON: expected a FeatureCollection");
  const auto& features = doc["features"];
  if (features.size() < 2) throw InputError("GeoJSON: need at least two features");

  std::map<Segment, std::vector<int>> owners;
  for (std::size_t f = 0; f < features.size(); ++f) {
    const auto& feature = features[f];
    if (!feature.is_object() || !feature.contains("geometry") || !feature["geometry"].is_object())
      throw InputError("GeoJSON: feature " + std::to_string(f) + " has no geometry");
    const auto& geom = feature["geometry"];
    const std::string type = geom.value("type", "");
    if (!geom.contains("coordinates"))
      throw InputError("GeoJSON: feature " + std::to_string(f) + " has no coordinates");
    std::vector<Segment> segments;
    if (type == "Polygon") {
      collect_polygon(geom["coordinates"], segments);
    } else if (type == "MultiPolygon") {
      if (!geom["coordinates"].is_array()) throw InputError("GeoJSON: invalid MultiPolygon");
      for (const auto& poly : geom["coordinates"]) collect_polygon(poly, segments);
    } else {
      throw InputError("GeoJSON: feature " + std::to_string(f) + " has non-polygon geometry '" +
                       type + "'");
    }
    std::sort(segments.begin(), segments.end());
    segments.erase(std::unique(segments.begin(), segments.end()), segments.end());
    for (const auto& s : segments) owners[s].push_back(static_cast<int>(f));
  }

  std::vector<std::vector<int>> nb(features.size());
  for (const auto& [segment, who] : owners) {
    for (std::size_t a = 0; a < who.size(); ++a)
      for (std::size_t b = a + 1; b < who.size(); ++b) {
        nb[static_cast<std::size_t>(who[a])].push_back(who[b]);
        nb[static_cast<std::size_t>(who[b])].push_back(who[a]);
      }
  }
  return SpatialWeights::from_neighbors(std::move(nb), standardize);
}

bool is_connected(const SpatialWeights& w) {
  const std::size_t n = w.n();
  if (n == 0) return false;
  std::vector<char> seen(n, 0);
  std::queue<int> frontier;
  frontier.push(0);
  seen[0] = 1;
  std::size_t reached = 1;
  while (!frontier.empty()) {
    const int i = frontier.front();
    frontier.pop();
    for (int j : w.neighbors(static_cast<std::size_t>(i))) {
      if (!seen[static_cast<std::size_t>(j)]) {
        seen[static_cast<std::size_t>(j)] = 1;
        ++reached;
        frontier.push(j);
      }
    }
  }
  return reached == n;
}

}  // namespace smaup
