#include "smaup/stats.hpp"

#include <algorithm>
#include <boost/math/distributions/fisher_f.hpp>
#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <numeric>
#include <string>

#include "smaup/error.hpp"

namespace smaup::stats {

double mean(std::span<const double> x) {
  if (x.empty()) throw DegenerateInputError("mean of an empty sample");
  return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

double variance(std::span<const double> x) {
  if (x.size() < 2) throw DegenerateInputError("variance needs at least two values");
  const double m = mean(x);
  double ss = 0.0;
  for (double v : x) ss += (v - m) * (v - m);
  return ss / static_cast<double>(x.size() - 1);
}

Descriptives descriptives(std::span<const double> x) { return {mean(x), variance(x)}; }

double rcm(std::span<const double> original, std::span<const double> aggregated,
           RatioDenominator denominator) {
  const double mo = mean(original);
  const double mag = mean(aggregated);
  if (mo == 0.0) throw DegenerateInputError("RCM is undefined when the original mean is zero");
  const double denom = denominator == RatioDenominator::Absolute ? std::abs(mo) : mo;
  return std::abs(mo - mag) / denom;
}

double rcv(std::span<const double> original, std::span<const double> aggregated) {
  const double vo = variance(original);
  if (vo == 0.0) throw DegenerateInputError("RCV is undefined when the original variance is zero");
  return std::abs(vo - variance(aggregated)) / vo;
}

double mean_over_repeats(std::span<const double> values) {
  if (values.empty()) throw DegenerateInputError("mean over zero repeats");
  return mean(values);
}

namespace {

void fill_levels(TestOutcome& t) {
  t.p_value = std::clamp(t.p_value, 0.0, 1.0);
  for (double alpha : kStandardLevels) t.rejected_at[alpha] = t.p_value < alpha;
}

double median_of(std::span<const double> x) {
  std::vector<double> s(x.begin(), x.end());
  std::sort(s.begin(), s.end());
  return percentile(s, 0.5);
}

}  // namespace

TestOutcome welch_t_test(std::span<const double> a, std::span<const double> b) {
  if (a.size() < 2 || b.size() < 2) throw InputError("t test needs at least two values per sample");
  const auto [ma, va] = descriptives(a);
  const auto [mb, vb] = descriptives(b);
  if (!std::isfinite(va) || !std::isfinite(vb)) throw InputError("t test: non-finite variance");
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  const double sa = va / na;
  const double sb = vb / nb;
  if (sa + sb == 0.0) throw DegenerateInputError("t test: both samples have zero variance");

  TestOutcome t;
  t.statistic = (ma - mb) / std::sqrt(sa + sb);
  t.df1 = (sa + sb) * (sa + sb) / (sa * sa / (na - 1.0) + sb * sb / (nb - 1.0));
  if (t.statistic == 0.0) {
    t.p_value = 1.0;
  } else {
    const boost::math::students_t dist(t.df1);
    t.p_value = 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(t.statistic)));
  }
  fill_levels(t);
  return t;
}

TestOutcome levene_test(std::span<const double> a, std::span<const double> b, LeveneCenter center) {
  if (a.size() < 2 || b.size() < 2) throw InputError("Levene test needs at least two values per sample");
  auto deviations = [center](std::span<const double> x) {
    const double c = center == LeveneCenter::Mean ? mean(x) : median_of(x);
    std::vector<double> z(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) z[i] = std::abs(x[i] - c);
    return z;
  };
  const auto za = deviations(a);
  const auto zb = deviations(b);
  const double na = static_cast<double>(za.size());
  const double nb = static_cast<double>(zb.size());
  const double ma = mean(za);
  const double mb = mean(zb);
  const double grand = (na * ma + nb * mb) / (na + nb);

  const double between = na * (ma - grand) * (ma - grand) + nb * (mb - grand) * (mb - grand);
  double within = 0.0;
  for (double z : za) within += (z - ma) * (z - ma);
  for (double z : zb) within += (z - mb) * (z - mb);

  TestOutcome t;
  t.df1 = 1.0;
  t.df2 = na + nb - 2.0;
  if (within == 0.0) {
    if (between == 0.0) throw DegenerateInputError("Levene test: all deviations are identical");
    t.statistic = std::numeric_limits<double>::infinity();
    t.p_value = 0.0;
  } else {
    t.statistic = between / (within / t.df2);
    if (t.statistic == 0.0) {
      t.p_value = 1.0;
    } else {
      const boost::math::fisher_f dist(t.df1, t.df2);
      t.p_value = boost::math::cdf(boost::math::complement(dist, t.statistic));
    }
  }
  fill_levels(t);
  return t;
}

double pseudo_p(std::span<const double> sorted_null, double m) {
  if (sorted_null.empty()) throw InputError("pseudo-p needs a nonempty null distribution");
  const auto above = sorted_null.end() - std::upper_bound(sorted_null.begin(), sorted_null.end(), m);
  return static_cast<double>(above) / static_cast<double>(sorted_null.size());
}

double percentile(std::span<const double> sorted, double q) {
  if (sorted.empty()) throw InputError("percentile of an empty sample");
  if (!(q >= 0.0 && q <= 1.0)) throw InputError("percentile level must lie in [0, 1]");
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

}  // namespace smaup::stats
