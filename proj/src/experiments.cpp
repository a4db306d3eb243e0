#include "smaup/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <string>

#include "smaup/error.hpp"
#include "smaup/parallel.hpp"
#include "smaup/rng.hpp"
#include "smaup/stats.hpp"

namespace smaup::experiments {

namespace {

// Stream tags keep the seed trees of different harnesses disjoint.
constexpr std::uint64_t kTagEffects = 0xEFFEC7;
constexpr std::uint64_t kTagNull = 0x5011;
constexpr std::uint64_t kTagPower = 0x90E7;
constexpr std::uint64_t kTagSize = 0x512E;

constexpr std::uint64_t kStreamBase = 1;
constexpr std::uint64_t kStreamTarget = 2;
constexpr std::uint64_t kStreamField = 3;
constexpr std::uint64_t kStreamRepeat = 4;

std::uint64_t u64(std::size_t v) { return static_cast<std::uint64_t>(v); }

}  // namespace

std::pair<std::size_t, std::size_t> lattice_shape(int n) {
  if (n < 2) throw InputError("a lattice needs at least two areas, got N = " + std::to_string(n));
  auto rows = static_cast<std::size_t>(std::sqrt(static_cast<double>(n)));
  while (rows * rows > static_cast<std::size_t>(n)) --rows;
  while (n % static_cast<int>(rows) != 0) --rows;
  return {rows, static_cast<std::size_t>(n) / rows};
}

SpatialWeights lattice_for(int n) {
  const auto [rows, cols] = lattice_shape(n);
  return build_lattice_rook(rows, cols);
}

const std::vector<int>& design_n_list() {
  static const std::vector<int> v{25, 100, 225, 400, 625, 900};
  return v;
}

const std::vector<double>& design_rho_list() {
  static const std::vector<double> v{-0.9, -0.7, -0.5, -0.3, 0.0, 0.3, 0.5, 0.7, 0.9};
  return v;
}

const std::map<int, std::vector<int>>& design_k_lists() {
  static const std::map<int, std::vector<int>> m{
      {25, {3, 5, 10, 13, 15, 18, 20, 22, 24}},
      {100, {2, 4, 7, 12, 25, 40, 53, 67, 80, 90, 99}},
      {225, {3, 5, 10, 15, 30, 60, 90, 120, 150, 180, 200, 220}},
      {400, {4, 9, 18, 26, 50, 110, 160, 213, 267, 320, 360, 396}},
      {625, {4, 6, 14, 27, 43, 80, 170, 250, 333, 417, 500, 563, 618}},
      {900, {4, 9, 20, 40, 60, 120, 240, 360, 480, 600, 720, 810, 890}},
  };
  return m;
}

const EffectsCell* EffectsSummary::find(int n, double rho, int k) const {
  for (const auto& c : cells)
    if (c.n == n && c.k == k && std::abs(c.rho - rho) < 1e-12) return &c;
  return nullptr;
}

const PowerSizeCell* PowerSizeReport::find(int n, double rho) const {
  for (const auto& c : cells)
    if (c.n == n && std::abs(c.rho - rho) < 1e-12) return &c;
  return nullptr;
}

namespace {

struct KTally {
  double rcm_bar = 0.0;
  double rcv_bar = 0.0;
  int t_rejections = 0;
  int levene_rejections = 0;
};

}  // namespace

EffectsSummary effects_experiment(const EffectsConfig& config) {
  if (config.instances < 1) throw InputError("effects: instances must be at least 1");
  if (config.r < 1) throw InputError("effects: r must be at least 1");
  if (config.n_list.empty() || config.rho_list.empty()) throw InputError("effects: empty N or rho list");
  for (double rho : config.rho_list)
    if (!(std::abs(rho) < 1.0)) throw InputError("effects: |rho| must be below 1");

  EffectsSummary summary;
  summary.config = config;

  // Feasible k per N; infeasible ones are reported and skipped.
  std::vector<std::vector<int>> ks(config.n_list.size());
  std::vector<SpatialWeights> weights;
  std::vector<std::unique_ptr<SarSolver>> base_solvers;
  std::vector<std::vector<std::unique_ptr<SarSolver>>> solvers(config.n_list.size());
  for (std::size_t ni = 0; ni < config.n_list.size(); ++ni) {
    const int n = config.n_list[ni];
    const auto it = config.k_lists.find(n);
    const auto& requested = it != config.k_lists.end() ? it->second : design_k_lists().count(n) ? design_k_lists().at(n)
                                                                                                : std::vector<int>{};
    if (requested.empty()) summary.warnings.push_back("N = " + std::to_string(n) + ": no k values configured");
    for (int k : requested) {
      if (k > n || k < 2)
        summary.warnings.push_back("skipped infeasible cell N = " + std::to_string(n) + ", k = " + std::to_string(k));
      else
        ks[ni].push_back(k);
    }
    weights.push_back(lattice_for(n));
    weights.back().eigenvalues();
    base_solvers.push_back(std::make_unique<SarSolver>(weights.back(), config.base_rho));
    for (double rho : config.rho_list) solvers[ni].push_back(std::make_unique<SarSolver>(weights.back(), rho));
  }

  const std::size_t n_rho = config.rho_list.size();
  const auto instances = static_cast<std::size_t>(config.instances);
  const std::size_t units = config.n_list.size() * instances * n_rho;

  struct UnitResult {
    std::vector<KTally> per_k;
    bool fallback = false;
  };
  std::vector<UnitResult> results(units);

  parallel_for(units, config.workers, [&](std::size_t u) {
    const std::size_t ni = u / (instances * n_rho);
    const std::size_t inst = (u / n_rho) % instances;
    const std::size_t ri = u % n_rho;
    const auto& w = weights[ni];
    const double rho = config.rho_list[ri];
    auto& out = results[u];

    const std::uint64_t unit_seed = derive_seed(config.master_seed, {kTagEffects, u64(ni), u64(inst)});
    std::optional<AreaVariable> y;
    if (config.rho_isolation) {
      Rng base_rng(derive_seed(unit_seed, {kStreamBase}));
      AreaVariable base = base_solvers[ni]->draw(w, base_rng);
      if (rho == config.base_rho) {
        y = std::move(base);
      } else {
        const std::uint64_t s = derive_seed(unit_seed, {kStreamTarget, u64(ri)});
        try {
          y = generate_with_target_rho(w, *solvers[ni][ri], base, config.window, config.max_retries, s).variable;
        } catch (const RetryExhaustedError& e) {
          y = e.best().variable;
          out.fallback = true;
        }
      }
    } else {
      Rng rng(derive_seed(unit_seed, {kStreamField, u64(ri)}));
      y = solvers[ni][ri]->draw(w, rng);
    }

    const auto original = y->values();
    out.per_k.resize(ks[ni].size());
    std::vector<double> rcm(static_cast<std::size_t>(config.r));
    std::vector<double> rcv(static_cast<std::size_t>(config.r));
    for (std::size_t kj = 0; kj < ks[ni].size(); ++kj) {
      auto& tally = out.per_k[kj];
      for (int rep = 0; rep < config.r; ++rep) {
        const std::uint64_t s = derive_seed(unit_seed, {kStreamRepeat, u64(ri), u64(kj), static_cast<std::uint64_t>(rep)});
        const auto regions = random_regions(w, ks[ni][kj], s);
        const auto agg = aggregate_mean(original, regions);
        rcm[static_cast<std::size_t>(rep)] = stats::rcm(original, agg.region_means, stats::RatioDenominator::Absolute);
        rcv[static_cast<std::size_t>(rep)] = stats::rcv(original, agg.region_means);
        if (stats::welch_t_test(original, agg.region_means).rejected(config.alpha)) ++tally.t_rejections;
        if (stats::levene_test(original, agg.region_means).rejected(config.alpha)) ++tally.levene_rejections;
      }
      tally.rcm_bar = stats::mean_over_repeats(rcm);
      tally.rcv_bar = stats::mean_over_repeats(rcv);
    }
  });

  for (std::size_t ni = 0; ni < config.n_list.size(); ++ni) {
    for (std::size_t ri = 0; ri < n_rho; ++ri) {
      for (std::size_t kj = 0; kj < ks[ni].size(); ++kj) {
        EffectsCell cell;
        cell.n = config.n_list[ni];
        cell.rho = config.rho_list[ri];
        cell.k = ks[ni][kj];
        int t_rej = 0, l_rej = 0;
        for (std::size_t inst = 0; inst < instances; ++inst) {
          const auto& unit = results[(ni * instances + inst) * n_rho + ri];
          const auto& tally = unit.per_k[kj];
          cell.rcm_bar.push_back(tally.rcm_bar);
          cell.rcv_bar.push_back(tally.rcv_bar);
          t_rej += tally.t_rejections;
          l_rej += tally.levene_rejections;
        }
        cell.tests = config.instances * config.r;
        cell.t_reject_proportion = static_cast<double>(t_rej) / cell.tests;
        cell.levene_reject_proportion = static_cast<double>(l_rej) / cell.tests;
        summary.cells.push_back(std::move(cell));
      }
    }
  }
  for (const auto& unit : results)
    if (unit.fallback) ++summary.target_rho_fallbacks;
  if (summary.target_rho_fallbacks > 0)
    summary.warnings.push_back(std::to_string(summary.target_rho_fallbacks) +
                               " instance(s) used the closest permutation after exhausting target-rho retries");
  return summary;
}

std::vector<bool> levene_run(const SpatialWeights& w, const AreaVariable& y, int k, int r, double levene_alpha,
                             std::uint64_t seed, stats::LeveneCenter center) {
  y.require_on(w);
  std::vector<bool> out(static_cast<std::size_t>(r));
  for (int rep = 0; rep < r; ++rep) {
    const auto regions = random_regions(w, k, derive_seed(seed, {static_cast<std::uint64_t>(rep)}));
    const auto agg = aggregate_mean(y.values(), regions);
    out[static_cast<std::size_t>(rep)] = stats::levene_test(y.values(), agg.region_means, center).rejected(levene_alpha);
  }
  return out;
}

bool accepts(Acceptance rule, const std::vector<bool>& levene_rejections) {
  if (levene_rejections.empty()) return false;
  const bool want = rule == Acceptance::LeveneAlwaysRejects;
  return std::all_of(levene_rejections.begin(), levene_rejections.end(), [want](bool b) { return b == want; });
}

AcceptedInstance draw_accepted_instance(const SpatialWeights& w, const SarSolver& solver, Acceptance rule,
                                        const InstanceConfig& config, std::uint64_t slot_seed) {
  const int n = static_cast<int>(w.n());
  const int k_lo = n / 10 + 1;  // 0.1 N < k
  const int k_hi = n - 1;       // k < N
  if (k_lo < 2 || k_lo > k_hi) throw InputError("no k with 0.1N < k < N and k >= 2 for N = " + std::to_string(n));
  if (config.r < 1) throw InputError("r must be at least 1");
  if (config.k_redraws_per_field < 1) throw InputError("k_redraws_per_field must be at least 1");
  const bool want = rule == Acceptance::LeveneAlwaysRejects;

  std::uint64_t attempts = 0;
  for (std::uint64_t field = 0;; ++field) {
    Rng field_rng(derive_seed(slot_seed, {kStreamField, field}));
    const AreaVariable y = solver.draw(w, field_rng);
    for (int draw = 0; draw < config.k_redraws_per_field; ++draw) {
      if (attempts >= config.stall_window)
        throw StallError("acceptance rate fell below " + std::to_string(1.0 / static_cast<double>(config.stall_window)) +
                             " (0 accepted in the last " + std::to_string(config.stall_window) + " attempts)",
                         0.0);
      ++attempts;
      Rng k_rng(derive_seed(slot_seed, {kStreamRepeat, field, static_cast<std::uint64_t>(draw)}));
      const int k = k_lo + static_cast<int>(k_rng.below(static_cast<std::uint64_t>(k_hi - k_lo + 1)));
      const std::uint64_t rep_seed = derive_seed(slot_seed, {kStreamBase, field, static_cast<std::uint64_t>(draw)});

      // Same seeds as levene_run, stopping at the first outcome that
      // decides the filter.
      bool accepted = true;
      for (int rep = 0; rep < config.r; ++rep) {
        const auto regions = random_regions(w, k, derive_seed(rep_seed, {static_cast<std::uint64_t>(rep)}));
        const auto agg = aggregate_mean(y.values(), regions);
        if (stats::levene_test(y.values(), agg.region_means, config.levene_center).rejected(config.levene_alpha) != want) {
          accepted = false;
          break;
        }
      }
      if (!accepted) continue;

      AcceptedInstance out;
      out.k = k;
      out.rho_hat = config.reuse_generating_rho ? solver.rho() : estimate_rho(w, y);
      out.m_value = m_statistic(out.rho_hat, static_cast<double>(k) / n);
      out.attempts = attempts;
      return out;
    }
  }
}

NullDistribution generate_null(const SpatialWeights& w, const NullConfig& config) {
  if (config.replicates < 1) throw InputError("null: replicates must be at least 1");
  w.eigenvalues();
  const SarSolver solver(w, config.rho);
  std::vector<double> values(static_cast<std::size_t>(config.replicates));
  parallel_for(values.size(), config.workers, [&](std::size_t slot) {
    const std::uint64_t seed = derive_seed(config.master_seed, {kTagNull, u64(slot)});
    values[slot] = draw_accepted_instance(w, solver, Acceptance::LeveneNeverRejects, config.instance, seed).m_value;
  });
  std::sort(values.begin(), values.end());
  NullDistribution out;
  out.n = static_cast<int>(w.n());
  out.rho = config.rho;
  out.values = std::move(values);
  out.replicates = config.replicates;
  out.r_aggregations = config.instance.r;
  out.master_seed = config.master_seed;
  return out;
}

NullDistribution generate_null(const NullConfig& config) { return generate_null(lattice_for(config.n), config); }

namespace {

PowerSizeReport run_power_size(const PowerSizeConfig& config, Acceptance rule, std::uint64_t tag, std::string kind) {
  if (config.instances < 1) throw InputError(kind + ": instances must be at least 1");
  if (config.n_list.empty() || config.rho_list.empty()) throw InputError(kind + ": empty N or rho list");
  const bool never = config.alpha <= 0.0;
  const bool always = config.alpha >= 1.0;
  if (!never && !always) CriticalValueTable::alpha_index(config.alpha);

  std::vector<SpatialWeights> weights;
  for (int n : config.n_list) {
    weights.push_back(lattice_for(n));
    weights.back().eigenvalues();
  }
  const std::size_t n_rho = config.rho_list.size();
  std::vector<std::unique_ptr<SarSolver>> solvers;
  for (std::size_t ni = 0; ni < config.n_list.size(); ++ni)
    for (double rho : config.rho_list) solvers.push_back(std::make_unique<SarSolver>(weights[ni], rho));

  const auto instances = static_cast<std::size_t>(config.instances);
  const std::size_t cells = solvers.size();
  struct Slot {
    bool rejected = false;
    std::uint64_t attempts = 0;
  };
  std::vector<Slot> slots(cells * instances);
  parallel_for(slots.size(), config.workers, [&](std::size_t s) {
    const std::size_t cell = s / instances;
    const std::size_t inst = s % instances;
    const std::size_t ni = cell / n_rho;
    const std::uint64_t seed = derive_seed(config.master_seed, {tag, u64(cell), u64(inst)});
    const auto a = draw_accepted_instance(weights[ni], *solvers[cell], rule, config.instance, seed);
    bool reject = always;
    if (!never && !always) reject = a.m_value > critical_value(config.n_list[ni], a.rho_hat, config.alpha);
    slots[s] = {reject, a.attempts};
  });

  PowerSizeReport report;
  report.kind = std::move(kind);
  report.config = config;
  for (std::size_t cell = 0; cell < cells; ++cell) {
    PowerSizeCell c;
    c.n = config.n_list[cell / n_rho];
    c.rho = config.rho_list[cell % n_rho];
    c.instances = config.instances;
    c.alpha = config.alpha;
    double attempts = 0.0;
    for (std::size_t inst = 0; inst < instances; ++inst) {
      const auto& slot = slots[cell * instances + inst];
      c.rejections += slot.rejected ? 1 : 0;
      attempts += static_cast<double>(slot.attempts);
    }
    c.proportion = static_cast<double>(c.rejections) / c.instances;
    c.mean_attempts = attempts / c.instances;
    report.cells.push_back(c);
  }
  return report;
}

}  // namespace

PowerSizeReport power_experiment(const PowerSizeConfig& config) {
  return run_power_size(config, Acceptance::LeveneAlwaysRejects, kTagPower, "power");
}

PowerSizeReport size_experiment(const PowerSizeConfig& config) {
  return run_power_size(config, Acceptance::LeveneNeverRejects, kTagSize, "size");
}

}  // namespace smaup::experiments
