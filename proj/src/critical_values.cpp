#include "smaup/critical_values.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>
#include <tuple>

#include "smaup/error.hpp"

namespace smaup {

namespace {

// Rows: rho from -0.9 to 0.9; within each rho, alpha 0.01, 0.05, 0.1;
// columns N = 25, 100, 225, 400, 625, 900.
constexpr std::array<double, CriticalValueTable::kEntries> kTable3{
    // rho = -0.9
    0.83702, 0.09218, 0.23808, 0.05488, 0.07218, 0.02621,
    0.83699, 0.08023, 0.10962, 0.04894, 0.04641, 0.02423,
    0.69331, 0.06545, 0.07858, 0.04015, 0.03374, 0.02187,
    // rho = -0.7
    0.83676, 0.16134, 0.13402, 0.06737, 0.05486, 0.02858,
    0.83662, 0.12492, 0.08643, 0.05900, 0.04280, 0.02459,
    0.79421, 0.09566, 0.06777, 0.05058, 0.03392, 0.02272,
    // rho = -0.5
    0.83597, 0.16524, 0.13446, 0.06616, 0.06247, 0.02851,
    0.83578, 0.13796, 0.08679, 0.05927, 0.04260, 0.02658,
    0.68900, 0.10707, 0.07039, 0.05151, 0.03609, 0.02411,
    // rho = -0.3
    0.83316, 0.19276, 0.13396, 0.06330, 0.06090, 0.03696,
    0.78849, 0.16932, 0.08775, 0.05464, 0.04787, 0.03042,
    0.73592, 0.14282, 0.07076, 0.04649, 0.04001, 0.02614,
    // rho = 0.0
    0.82370, 0.17925, 0.15514, 0.07732, 0.07988, 0.09301,
    0.81952, 0.15746, 0.11126, 0.06961, 0.06066, 0.05234,
    0.71632, 0.13621, 0.08801, 0.06112, 0.04937, 0.03759,
    // rho = 0.3
    0.76472, 0.23404, 0.24640, 0.11588, 0.10715, 0.07070,
    0.70466, 0.21088, 0.15360, 0.09766, 0.07938, 0.06461,
    0.63718, 0.18239, 0.12101, 0.08324, 0.06347, 0.05549,
    // rho = 0.5
    0.67337, 0.28921, 0.25535, 0.13992, 0.12975, 0.09856,
    0.59461, 0.23497, 0.18244, 0.11682, 0.10129, 0.08860,
    0.46548, 0.17541, 0.14248, 0.10008, 0.08137, 0.07701,
    // rho = 0.7
    0.52155, 0.47399, 0.29351, 0.23923, 0.20321, 0.16250,
    0.48958, 0.37226, 0.22280, 0.20540, 0.16144, 0.14123,
    0.34720, 0.28774, 0.18170, 0.16442, 0.13395, 0.12354,
    // rho = 0.9
    0.28599, 0.28938, 0.43520, 0.44060, 0.34437, 0.55967,
    0.21580, 0.22532, 0.27122, 0.29043, 0.23648, 0.31424,
    0.17640, 0.18835, 0.21695, 0.23031, 0.19435, 0.22411,
};

}  // namespace

CriticalValueTable::CriticalValueTable(std::array<double, kEntries> values) : values_(values) {
  for (std::size_t r = 0; r < kRhos.size(); ++r)
    for (std::size_t c = 0; c < kAreas.size(); ++c)
      for (std::size_t a = 0; a + 1 < kAlphas.size(); ++a)
        if (at(r, c, a) < at(r, c, a + 1))
          throw InputError("critical values not ordered in alpha at rho = " + std::to_string(kRhos[r]) +
                           ", N = " + std::to_string(kAreas[c]));
}

const CriticalValueTable& CriticalValueTable::embedded() {
  static const CriticalValueTable table(kTable3);
  return table;
}

std::size_t CriticalValueTable::alpha_index(double alpha) {
  for (std::size_t i = 0; i < kAlphas.size(); ++i)
    if (std::abs(alpha - kAlphas[i]) < 1e-12) return i;
  throw InputError("unsupported significance level " + std::to_string(alpha) +
                   "; tabulated levels are 0.01, 0.05, 0.1");
}

std::size_t CriticalValueTable::nearest_rho_index(double rho) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < kRhos.size(); ++i) {
    const double d = std::abs(rho - kRhos[i]);
    const double db = std::abs(rho - kRhos[best]);
    // Grid values are not exact in binary; compare with a small slack so
    // exact midpoints resolve toward zero.
    if (d < db - 1e-12 || (std::abs(d - db) <= 1e-12 && std::abs(kRhos[i]) < std::abs(kRhos[best])))
      best = i;
  }
  return best;
}

std::size_t CriticalValueTable::nearest_n_index(double n) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < kAreas.size(); ++i)
    if (std::abs(n - kAreas[i]) < std::abs(n - kAreas[best])) best = i;
  return best;
}

namespace {

// Bracketing indices and weight for linear interpolation on a sorted grid.
template <typename Grid>
std::tuple<std::size_t, std::size_t, double> bracket(const Grid& grid, double x) {
  if (x <= grid.front()) return {0, 0, 0.0};
  if (x >= grid.back()) return {grid.size() - 1, grid.size() - 1, 0.0};
  std::size_t hi = 1;
  while (static_cast<double>(grid[hi]) < x) ++hi;
  const double x0 = grid[hi - 1], x1 = grid[hi];
  return {hi - 1, hi, (x - x0) / (x1 - x0)};
}

}  // namespace

double CriticalValueTable::lookup(double n, double rho, double alpha, CriticalLookup mode) const {
  const std::size_t a = alpha_index(alpha);
  if (!std::isfinite(rho) || !std::isfinite(n)) throw InputError("critical value lookup: non-finite argument");
  if (mode == CriticalLookup::Nearest) return at(nearest_rho_index(rho), nearest_n_index(n), a);

  const auto [r0, r1, tr] = bracket(kRhos, rho);
  const auto [c0, c1, tc] = bracket(kAreas, n);
  const double low = (1 - tc) * at(r0, c0, a) + tc * at(r0, c1, a);
  const double high = (1 - tc) * at(r1, c0, a) + tc * at(r1, c1, a);
  return (1 - tr) * low + tr * high;
}

std::vector<CriticalValueTable::Entry> CriticalValueTable::entries() const {
  std::vector<Entry> out;
  out.reserve(kEntries);
  for (std::size_t r = 0; r < kRhos.size(); ++r)
    for (std::size_t c = 0; c < kAreas.size(); ++c)
      for (std::size_t a = 0; a < kAlphas.size(); ++a) out.push_back({kRhos[r], kAreas[c], kAlphas[a], at(r, c, a)});
  return out;
}

std::string CriticalValueTable::to_csv() const {
  std::string out = "rho,n,alpha,value\n";
  char buf[96];
  for (const auto& e : entries()) {
    std::snprintf(buf, sizeof buf, "%.1f,%d,%g,%.5f\n", e.rho, e.n, e.alpha, e.value);
    out += buf;
  }
  return out;
}

double critical_value(double n, double rho, double alpha, CriticalLookup mode) {
  return CriticalValueTable::embedded().lookup(n, rho, alpha, mode);
}

}  // namespace smaup
