#include <algorithm>

#include "doctest.h"
#include "smaup/error.hpp"
#include "smaup/experiments.hpp"
#include "smaup/io.hpp"
#include "smaup/stats.hpp"

using namespace smaup;
using namespace smaup::experiments;

TEST_SUITE("experiments") {
  TEST_CASE("lattice shapes") {
    CHECK(lattice_shape(100) == std::pair<std::size_t, std::size_t>{10, 10});
    CHECK(lattice_shape(206) == std::pair<std::size_t, std::size_t>{2, 103});
    CHECK(lattice_shape(12) == std::pair<std::size_t, std::size_t>{3, 4});
    CHECK(lattice_for(900).n() == 900);
    CHECK_THROWS_AS(lattice_shape(0), InputError);
  }

  TEST_CASE("filters are mutually exclusive on the same draws") {
    const auto w = build_lattice_rook(10, 10);
    int accepted_null = 0, accepted_power = 0;
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
      const auto y = generate_sar(w, {0.0, seed});
      for (int k : {15, 40, 70, 95}) {
        const auto v = levene_run(w, y, k, 30, 0.05, seed * 7 + static_cast<std::uint64_t>(k));
        const bool a = accepts(Acceptance::LeveneNeverRejects, v), b = accepts(Acceptance::LeveneAlwaysRejects, v);
        REQUIRE_FALSE((a && b));
        accepted_null += a;
        accepted_power += b;
      }
    }
    // Both filters are exercised by this sweep.
    CHECK(accepted_null > 0);
    CHECK(accepted_power > 0);
    CHECK_FALSE(accepts(Acceptance::LeveneNeverRejects, {}));
  }

  TEST_CASE("accepted instances satisfy their filter") {
    const auto w = build_lattice_rook(10, 10);
    const SarSolver solver(w, 0.3);
    InstanceConfig cfg;
    for (std::uint64_t slot = 0; slot < 10; ++slot) {
      const auto inst = draw_accepted_instance(w, solver, Acceptance::LeveneNeverRejects, cfg, slot);
      CHECK(inst.k > 10);
      CHECK(inst.k < 100);
      CHECK(inst.m_value > 0.0);
      CHECK(inst.m_value < 1.0);
      CHECK(inst.m_value == doctest::Approx(m_statistic(inst.rho_hat, inst.k / 100.0)));
    }
    cfg.reuse_generating_rho = true;
    CHECK(draw_accepted_instance(w, solver, Acceptance::LeveneAlwaysRejects, cfg, 3).rho_hat == 0.3);
  }

  TEST_CASE("stall is reported") {
    const auto w = build_lattice_rook(10, 10);
    InstanceConfig cfg;
    cfg.stall_window = 3;
    cfg.levene_alpha = 1e-300;  // nothing ever rejects, so the power filter never accepts
    try {
      draw_accepted_instance(w, SarSolver(w, 0.0), Acceptance::LeveneAlwaysRejects, cfg, 1);
      FAIL("expected StallError");
    } catch (const StallError& e) {
      CHECK(e.rate() < 1.0 / 3.0);
    }
  }

  TEST_CASE("null distribution: single replicate, sortedness, percentiles") {
    NullConfig cfg;
    cfg.n = 25;
    cfg.rho = 0.0;
    cfg.replicates = 1;
    cfg.master_seed = 9;
    const auto one = generate_null(cfg);
    REQUIRE(one.values.size() == 1);
    CHECK(one.values[0] > 0.0);
    CHECK(one.values[0] < 1.0);

    cfg.replicates = 200;
    const auto d = generate_null(cfg);
    CHECK_NOTHROW(d.validate());
    CHECK(std::is_sorted(d.values.begin(), d.values.end()));
    const double p90 = stats::percentile(d.values, 0.90), p95 = stats::percentile(d.values, 0.95),
                 p99 = stats::percentile(d.values, 0.99);
    CHECK(p90 <= p95);
    CHECK(p95 <= p99);
    CHECK_THROWS_AS(generate_null(NullConfig{25, 0.0, 0}), InputError);
  }

  TEST_CASE("determinism across worker counts") {
    NullConfig nc;
    nc.n = 49;
    nc.rho = 0.5;
    nc.replicates = 40;
    nc.master_seed = 77;
    nc.workers = 1;
    const auto a = generate_null(nc);
    nc.workers = 4;
    CHECK(generate_null(nc).values == a.values);

    PowerSizeConfig pc;
    pc.n_list = {49};
    pc.rho_list = {-0.5, 0.5};
    pc.instances = 15;
    pc.master_seed = 5;
    pc.workers = 1;
    const auto p1 = io::to_json(power_experiment(pc)).dump();
    const auto s1 = io::to_json(size_experiment(pc)).dump();
    pc.workers = 3;
    CHECK(io::to_json(power_experiment(pc)).dump() == p1);
    CHECK(io::to_json(size_experiment(pc)).dump() == s1);

    EffectsConfig ec;
    ec.n_list = {49};
    ec.rho_list = {-0.5, 0.5};
    ec.k_lists = {{49, {5, 20}}};
    ec.instances = 3;
    ec.r = 5;
    ec.master_seed = 3;
    ec.workers = 1;
    const auto e1 = io::effects_to_csv(effects_experiment(ec));
    ec.workers = 4;
    CHECK(io::effects_to_csv(effects_experiment(ec)) == e1);
  }

  TEST_CASE("power and size: degenerate levels and proportions in [0, 1]") {
    PowerSizeConfig pc;
    pc.n_list = {100};
    pc.rho_list = {0.0};
    pc.instances = 10;
    pc.alpha = 1.0;
    CHECK(power_experiment(pc).cells.at(0).proportion == 1.0);
    pc.alpha = 0.0;
    CHECK(size_experiment(pc).cells.at(0).proportion == 0.0);
    pc.alpha = 0.1;
    const auto rep = size_experiment(pc);
    const auto* cell = rep.find(100, 0.0);
    REQUIRE(cell != nullptr);
    CHECK(cell->proportion >= 0.0);
    CHECK(cell->proportion <= 1.0);
    CHECK(cell->instances == 10);
    CHECK(rep.kind == "size");
    pc.alpha = 0.2;
    CHECK_THROWS_AS(power_experiment(pc), InputError);
    pc.alpha = 0.05;
    pc.instances = 0;
    CHECK_THROWS_AS(power_experiment(pc), InputError);
  }

  TEST_CASE("effects: shapes, warnings and trend") {
    EffectsConfig ec;
    ec.n_list = {100};
    ec.rho_list = {-0.9, 0.9};
    ec.k_lists = {{100, {1, 12, 90, 150}}};
    ec.instances = 4;
    ec.r = 10;
    ec.master_seed = 11;
    const auto s = effects_experiment(ec);
    CHECK(s.cells.size() == 4);  // k = 1 and k = 150 skipped
    CHECK(s.warnings.size() >= 2);
    for (const auto& c : s.cells) {
      CHECK(c.rcm_bar.size() == 4);
      CHECK(c.rcv_bar.size() == 4);
      CHECK(c.tests == 40);
      CHECK(c.t_reject_proportion >= 0.0);
      CHECK(c.levene_reject_proportion <= 1.0);
    }
    const auto* hi = s.find(100, 0.9, 90);
    const auto* lo = s.find(100, -0.9, 12);
    REQUIRE(hi);
    REQUIRE(lo);
    CHECK(stats::mean(hi->rcv_bar) < stats::mean(lo->rcv_bar));
    CHECK(s.find(100, 0.9, 150) == nullptr);
  }

  TEST_CASE("effects: independent draws mode runs too") {
    EffectsConfig ec;
    ec.n_list = {25};
    ec.rho_list = {0.0};
    ec.k_lists = {{25, {5}}};
    ec.instances = 2;
    ec.r = 3;
    ec.rho_isolation = false;
    const auto s = effects_experiment(ec);
    REQUIRE(s.cells.size() == 1);
    CHECK(s.target_rho_fallbacks == 0);
  }
}
