#pragma once

#include <map>
#include <optional>
#include <vector>

#include "smaup/critical_values.hpp"
#include "smaup/null_distribution.hpp"
#include "smaup/sar.hpp"
#include "smaup/spatial_weights.hpp"

namespace smaup {

/// Constants of the fitted S-maup curve.
struct SmaupParams {
  double b = -2.188;
  double m = 7.031;
  double p = 0.516;
  double a = 1.287;
  double beta0 = 5.319;
  double beta1 = -5.532;
};

/// Upper asymptote L(theta) = 1 / (1 + exp(b + m theta)).
double l_of_theta(double theta, const SmaupParams& params = {});
/// eta(theta) = p theta^a.
double eta_of_theta(double theta, const SmaupParams& params = {});
/// tau(theta) = beta0 + beta1 theta.
double tau_of_theta(double theta, const SmaupParams& params = {});

/// M(rho, theta) = L(theta) / (1 + eta(theta) exp(tau(theta) rho)).
/// Throws InputError unless theta in (0, 1] and rho in (-1, 1).
double m_statistic(double rho, double theta, const SmaupParams& params = {});

struct SmaupOptions {
  SmaupParams params{};
  /// Use this rho instead of estimating it from the variable.
  std::optional<double> rho_override;
  CriticalLookup lookup = CriticalLookup::Nearest;
};

struct SmaupResult {
  double m_value = 0.0;
  double theta = 0.0;
  double rho_used = 0.0;
  bool rho_estimated = true;
  int n = 0;
  int k = 0;
  double alpha = 0.05;
  std::map<double, double> critical_values;  // alpha -> M_{alpha; rho, N}
  std::map<double, bool> decision;           // alpha -> M > critical value
  std::optional<double> pseudo_p;
  std::map<double, bool> pseudo_decision;    // alpha -> pseudo_p < alpha

  /// Decision at the requested alpha: the pseudo-p rule when a null
  /// distribution was supplied, the critical-value rule otherwise.
  bool rejected() const;
  bool rejected(double level) const;
};

/// Evaluates M for k regions on y and compares against the tabulated
/// critical values (and the supplied null distribution, if any).
SmaupResult smaup_test(const AreaVariable& y, const SpatialWeights& w, int k, double alpha,
                       const NullDistribution* null = nullptr, const SmaupOptions& options = {});

/// Same, with rho already known (no estimation).
SmaupResult smaup_test_with_rho(double rho, int n, int k, double alpha, const NullDistribution* null = nullptr,
                                const SmaupOptions& options = {});

struct ScanRow {
  int k;
  SmaupResult result;
};

struct MinSafeK {
  /// Empty when even the largest k in range rejects.
  std::optional<int> k;
  /// Rows evaluated, descending in k, ending at the first rejection.
  std::vector<ScanRow> rows;
};

/// Scans k from k_max down to k_min and returns the last k before the first
/// rejection at alpha.
MinSafeK min_safe_k(const AreaVariable& y, const SpatialWeights& w, double alpha, int k_min, int k_max,
                    const NullDistribution* null = nullptr, const SmaupOptions& options = {});

/// Every k in [k_min, k_max], descending, with rho estimated once.
std::vector<ScanRow> scan_k(const AreaVariable& y, const SpatialWeights& w, double alpha, int k_min, int k_max,
                            const NullDistribution* null = nullptr, const SmaupOptions& options = {});

}  // namespace smaup
