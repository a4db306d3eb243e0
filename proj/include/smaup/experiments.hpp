#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "smaup/null_distribution.hpp"
#include "smaup/regionalize.hpp"
#include "smaup/sar.hpp"
#include "smaup/smaup_core.hpp"
#include "smaup/spatial_weights.hpp"
#include "smaup/stats.hpp"

namespace smaup::experiments {

/// Rows x cols of the most square rook lattice with exactly n cells.
std::pair<std::size_t, std::size_t> lattice_shape(int n);
SpatialWeights lattice_for(int n);

/// The N grid and per-N k lists of the original MAUP-effects design.
const std::vector<int>& design_n_list();
const std::vector<double>& design_rho_list();
const std::map<int, std::vector<int>>& design_k_lists();

// ---------------------------------------------------------------------------
// MAUP effects on the mean and the variance

struct EffectsConfig {
  std::vector<int> n_list{100};
  std::vector<double> rho_list{-0.9, 0.0, 0.9};
  std::map<int, std::vector<int>> k_lists;  // per N
  int instances = 50;
  int r = 30;
  /// Permute one base field onto every rho (shared value multiset) instead
  /// of drawing an independent SAR field per rho.
  bool rho_isolation = true;
  double base_rho = 0.9;
  double window = 0.5;
  int max_retries = 200;
  double alpha = 0.05;
  std::uint64_t master_seed = 0;
  std::size_t workers = 1;
};

struct EffectsCell {
  int n = 0;
  double rho = 0.0;
  int k = 0;
  std::vector<double> rcm_bar;  // one per instance
  std::vector<double> rcv_bar;
  double t_reject_proportion = 0.0;       // over instances x repeats
  double levene_reject_proportion = 0.0;  // over instances x repeats
  int tests = 0;
};

struct EffectsSummary {
  EffectsConfig config;
  std::vector<EffectsCell> cells;
  std::vector<std::string> warnings;
  /// Instances whose target-rho search exhausted its retries; the closest
  /// attempt was used.
  int target_rho_fallbacks = 0;
  /// RCM divides by |mu_o| because SAR fields are centred on zero.
  bool rcm_absolute_denominator = true;

  const EffectsCell* find(int n, double rho, int k) const;
};

EffectsSummary effects_experiment(const EffectsConfig& config);

// ---------------------------------------------------------------------------
// Null distribution, power, size

enum class Acceptance {
  LeveneNeverRejects,   // H0 instances: null distribution and size
  LeveneAlwaysRejects,  // H1 instances: power
};

struct InstanceConfig {
  int r = 30;
  double levene_alpha = 0.05;
  /// Redraw the SAR field after this many failed k draws on it.
  int k_redraws_per_field = 50;
  /// A slot stalls after this many consecutive rejected attempts, i.e. its
  /// acceptance rate over the window is below 1 / stall_window.
  std::uint64_t stall_window = 100000;
  /// Use the generating rho instead of re-estimating it per instance.
  bool reuse_generating_rho = false;
  stats::LeveneCenter levene_center = stats::LeveneCenter::Mean;
};

struct AcceptedInstance {
  int k = 0;
  double rho_hat = 0.0;
  double m_value = 0.0;
  std::uint64_t attempts = 0;
};

/// Levene outcomes (rejected at levene_alpha?) for r random aggregations of
/// y into k regions. Both acceptance filters are functions of this vector.
std::vector<bool> levene_run(const SpatialWeights& w, const AreaVariable& y, int k, int r, double levene_alpha,
                             std::uint64_t seed, stats::LeveneCenter center = stats::LeveneCenter::Mean);

bool accepts(Acceptance rule, const std::vector<bool>& levene_rejections);

/// Draws instances for one slot (SAR field, uniform k with 0.1N < k < N, r
/// aggregations) until `rule` accepts one. Depends only on `slot_seed`.
AcceptedInstance draw_accepted_instance(const SpatialWeights& w, const SarSolver& solver, Acceptance rule,
                                        const InstanceConfig& config, std::uint64_t slot_seed);

struct NullConfig {
  int n = 100;
  double rho = 0.0;
  int replicates = 1000;
  std::uint64_t master_seed = 0;
  std::size_t workers = 1;
  InstanceConfig instance{};
};

NullDistribution generate_null(const NullConfig& config);
NullDistribution generate_null(const SpatialWeights& w, const NullConfig& config);

struct PowerSizeConfig {
  std::vector<int> n_list{100, 400, 900};
  std::vector<double> rho_list{-0.9, -0.7, -0.5, -0.3, 0.0, 0.3, 0.5, 0.7, 0.9};
  int instances = 1000;
  /// 0 never rejects and 1 always rejects; other values must be tabulated.
  double alpha = 0.05;
  std::uint64_t master_seed = 0;
  std::size_t workers = 1;
  InstanceConfig instance{};
};

struct PowerSizeCell {
  int n = 0;
  double rho = 0.0;
  double proportion = 0.0;
  int instances = 0;
  int rejections = 0;
  double alpha = 0.05;
  double mean_attempts = 0.0;
};

struct PowerSizeReport {
  std::string kind;  // "power" or "size"
  PowerSizeConfig config;
  std::vector<PowerSizeCell> cells;

  const PowerSizeCell* find(int n, double rho) const;
};

PowerSizeReport power_experiment(const PowerSizeConfig& config);
PowerSizeReport size_experiment(const PowerSizeConfig& config);

}  // namespace smaup::experiments
