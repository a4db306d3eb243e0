#pragma once

#include <array>
#include <string>
#include <vector>

namespace smaup {

enum class CriticalLookup {
  Nearest,   // snap rho and N to the closest grid values
  Bilinear,  // interpolate between neighbouring grid values, clamped
};

/// Critical values of M under H0 on the grid rho x N x alpha.
class CriticalValueTable {
 public:
  static constexpr std::array<double, 9> kRhos{-0.9, -0.7, -0.5, -0.3, 0.0, 0.3, 0.5, 0.7, 0.9};
  static constexpr std::array<int, 6> kAreas{25, 100, 225, 400, 625, 900};
  static constexpr std::array<double, 3> kAlphas{0.01, 0.05, 0.1};
  static constexpr std::size_t kEntries = kRhos.size() * kAreas.size() * kAlphas.size();

  struct Entry {
    double rho;
    int n;
    double alpha;
    double value;
  };

  /// The table shipped with the library (data version kVersion). Validated
  /// on first access.
  static const CriticalValueTable& embedded();
  static constexpr const char* kVersion = "smaup-critical-values/1";

  /// Builds from rho-major, then alpha, then N ordered values. Throws
  /// InputError if the alpha ordering invariant fails for any (rho, N).
  explicit CriticalValueTable(std::array<double, kEntries> values);

  double at(std::size_t rho_index, std::size_t n_index, std::size_t alpha_index) const {
    return values_[(rho_index * kAlphas.size() + alpha_index) * kAreas.size() + n_index];
  }

  /// Throws InputError unless alpha is one of kAlphas.
  static std::size_t alpha_index(double alpha);
  /// Index of the closest grid rho; ties go toward zero.
  static std::size_t nearest_rho_index(double rho);
  /// Index of the closest grid N (clamped at both ends).
  static std::size_t nearest_n_index(double n);

  double lookup(double n, double rho, double alpha, CriticalLookup mode = CriticalLookup::Nearest) const;

  std::vector<Entry> entries() const;
  /// CSV with header `rho,n,alpha,value`, values printed to 5 decimals.
  std::string to_csv() const;

 private:
  std::array<double, kEntries> values_;
};

/// Embedded-table lookup; nearest-grid snapping by default.
double critical_value(double n, double rho, double alpha, CriticalLookup mode = CriticalLookup::Nearest);

}  // namespace smaup
