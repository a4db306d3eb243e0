#include "smaup/smaup_core.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "smaup/error.hpp"
#include "smaup/stats.hpp"

namespace smaup {

void NullDistribution::validate() const {
  if (n < 1) throw InputError("null distribution: n must be positive");
  if (values.empty()) throw InputError("null distribution: no values");
  if (replicates != static_cast<int>(values.size()))
    throw InputError("null distribution: replicates does not match the number of values");
  for (double v : values)
    if (!std::isfinite(v)) throw InputError("null distribution: non-finite value");
  if (!std::is_sorted(values.begin(), values.end()))
    throw InputError("null distribution: values must be sorted ascending");
}

namespace {

void check_theta(double theta) {
  if (!(theta > 0.0 && theta <= 1.0)) throw InputError("theta must lie in (0, 1], got " + std::to_string(theta));
}

}  // namespace

double l_of_theta(double theta, const SmaupParams& params) {
  check_theta(theta);
  return 1.0 / (1.0 + std::exp(params.b + params.m * theta));
}

double eta_of_theta(double theta, const SmaupParams& params) {
  check_theta(theta);
  return params.p * std::pow(theta, params.a);
}

double tau_of_theta(double theta, const SmaupParams& params) {
  check_theta(theta);
  return params.beta0 + params.beta1 * theta;
}

double m_statistic(double rho, double theta, const SmaupParams& params) {
  if (!(rho > -1.0 && rho < 1.0)) throw InputError("rho must lie in (-1, 1), got " + std::to_string(rho));
  return l_of_theta(theta, params) /
         (1.0 + eta_of_theta(theta, params) * std::exp(tau_of_theta(theta, params) * rho));
}

bool SmaupResult::rejected(double level) const {
  if (pseudo_p) return *pseudo_p < level;
  const auto it = decision.find(level);
  if (it == decision.end()) throw InputError("no decision recorded at alpha = " + std::to_string(level));
  return it->second;
}

bool SmaupResult::rejected() const { return rejected(alpha); }

SmaupResult smaup_test_with_rho(double rho, int n, int k, double alpha, const NullDistribution* null,
                                const SmaupOptions& options) {
  CriticalValueTable::alpha_index(alpha);
  if (n < 1 || k < 1 || k > n)
    throw InputError("k must lie in [1, " + std::to_string(n) + "], got " + std::to_string(k));
  SmaupResult r;
  r.n = n;
  r.k = k;
  r.alpha = alpha;
  r.rho_used = rho;
  r.rho_estimated = false;
  r.theta = static_cast<double>(k) / static_cast<double>(n);
  r.m_value = m_statistic(rho, r.theta, options.params);
  for (double level : CriticalValueTable::kAlphas) {
    const double cv = critical_value(n, rho, level, options.lookup);
    r.critical_values[level] = cv;
    r.decision[level] = r.m_value > cv;
  }
  if (null) {
    null->validate();
    r.pseudo_p = stats::pseudo_p(null->values, r.m_value);
    for (double level : CriticalValueTable::kAlphas) r.pseudo_decision[level] = *r.pseudo_p < level;
  }
  return r;
}

namespace {

double rho_for(const AreaVariable& y, const SpatialWeights& w, const SmaupOptions& options) {
  y.require_on(w);
  return options.rho_override ? *options.rho_override : estimate_rho(w, y);
}

}  // namespace

SmaupResult smaup_test(const AreaVariable& y, const SpatialWeights& w, int k, double alpha,
                       const NullDistribution* null, const SmaupOptions& options) {
  const int n = static_cast<int>(w.n());
  if (k < 1 || k > n) throw InputError("k must lie in [1, " + std::to_string(n) + "], got " + std::to_string(k));
  auto r = smaup_test_with_rho(rho_for(y, w, options), n, k, alpha, null, options);
  r.rho_estimated = !options.rho_override.has_value();
  return r;
}

namespace {

void check_range(int k_min, int k_max, int n) {
  if (k_min < 1 || k_max > n || k_min > k_max)
    throw InputError("k range [" + std::to_string(k_min) + ", " + std::to_string(k_max) + "] must lie within [1, " +
                     std::to_string(n) + "]");
}

}  // namespace

std::vector<ScanRow> scan_k(const AreaVariable& y, const SpatialWeights& w, double alpha, int k_min, int k_max,
                            const NullDistribution* null, const SmaupOptions& options) {
  const int n = static_cast<int>(w.n());
  check_range(k_min, k_max, n);
  const double rho = rho_for(y, w, options);
  std::vector<ScanRow> rows;
  rows.reserve(static_cast<std::size_t>(k_max - k_min + 1));
  for (int k = k_max; k >= k_min; --k) {
    auto r = smaup_test_with_rho(rho, n, k, alpha, null, options);
    r.rho_estimated = !options.rho_override.has_value();
    rows.push_back({k, std::move(r)});
  }
  return rows;
}

MinSafeK min_safe_k(const AreaVariable& y, const SpatialWeights& w, double alpha, int k_min, int k_max,
                    const NullDistribution* null, const SmaupOptions& options) {
  const int n = static_cast<int>(w.n());
  check_range(k_min, k_max, n);
  const double rho = rho_for(y, w, options);
  MinSafeK out;
  for (int k = k_max; k >= k_min; --k) {
    auto r = smaup_test_with_rho(rho, n, k, alpha, null, options);
    r.rho_estimated = !options.rho_override.has_value();
    const bool reject = r.rejected();
    out.rows.push_back({k, std::move(r)});
    if (reject) return out;
    out.k = k;
  }
  return out;
}

}  // namespace smaup
