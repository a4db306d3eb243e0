#pragma once

#include <array>
#include <map>
#include <span>
#include <vector>

namespace smaup::stats {

/// The significance levels reported by every test outcome.
inline constexpr std::array<double, 3> kStandardLevels{0.01, 0.05, 0.1};

struct Descriptives {
  double mean;
  double variance;  // divisor n - 1
};

double mean(std::span<const double> x);
/// Sample variance (n - 1). Throws DegenerateInputError for fewer than two
/// values.
double variance(std::span<const double> x);
Descriptives descriptives(std::span<const double> x);

enum class RatioDenominator {
  Signed,    // mu_o exactly as in the relative-change formula
  Absolute,  // |mu_o|, for zero-centred fields
};

/// Relative change in the mean, |mu_o - mu_ag| / mu_o.
/// Throws DegenerateInputError when mu_o == 0.
double rcm(std::span<const double> original, std::span<const double> aggregated,
           RatioDenominator denominator = RatioDenominator::Signed);

/// Relative change in the variance, |s2_o - s2_ag| / s2_o.
double rcv(std::span<const double> original, std::span<const double> aggregated);

/// Arithmetic mean of per-repeat values (RCM-bar, RCV-bar).
double mean_over_repeats(std::span<const double> values);

struct TestOutcome {
  double statistic = 0.0;
  double p_value = 1.0;
  double df1 = 0.0;
  double df2 = 0.0;  // unused by the t test
  std::map<double, bool> rejected_at;  // filled for kStandardLevels

  bool rejected(double alpha) const { return p_value < alpha; }
};

/// Two-sided Welch t test with Welch-Satterthwaite degrees of freedom.
TestOutcome welch_t_test(std::span<const double> a, std::span<const double> b);

enum class LeveneCenter { Mean, Median };

/// Two-group Levene test: one-way ANOVA F on absolute deviations from each
/// group's centre, df (1, n_a + n_b - 2).
TestOutcome levene_test(std::span<const double> a, std::span<const double> b,
                        LeveneCenter center = LeveneCenter::Mean);

/// Fraction of null values strictly greater than m.
double pseudo_p(std::span<const double> sorted_null, double m);

/// Linear-interpolation percentile of sorted data, q in [0, 1].
double percentile(std::span<const double> sorted, double q);

}  // namespace smaup::stats
