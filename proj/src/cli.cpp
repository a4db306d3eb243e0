#include "smaup/cli.hpp"

#include <algorithm>
#include <cstdio>
#include <iostream>
#include <map>
#include <optional>
#include <random>
#include <sstream>

#include "CLI11.hpp"
#include "smaup/error.hpp"
#include "smaup/experiments.hpp"
#include "smaup/io.hpp"
#include "smaup/parallel.hpp"
#include "smaup/regionalize.hpp"
#include "smaup/sar.hpp"
#include "smaup/smaup_core.hpp"
#include "smaup/spatial_weights.hpp"

namespace smaup::cli {

namespace {

using io::json;

struct Emitter {
  std::ostream& out;
  std::ostream& err;

  // Writes to `path`, or to `out` when path is empty.
  void emit(const std::string& path, const std::string& content) const {
    if (path.empty())
      out << content;
    else
      io::write_file(path, content);
  }
};

std::string fmt(const char* pattern, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, pattern, v);
  return buf;
}

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& seed, std::ostream& err) {
  if (seed) return *seed;
  std::random_device rd;
  const std::uint64_t s = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
  err << "seed: " << s << "\n";
  return s;
}

SpatialWeights load_weights(const std::string& path) {
  try {
    return io::weights_from_json(json::parse(io::read_file(path)));
  } catch (const json::parse_error& e) {
    throw InputError("weights file '" + path + "': " + e.what());
  }
}

AreaVariable load_values(const std::string& path, const SpatialWeights& w) {
  return AreaVariable(io::parse_values_csv(io::read_file(path)), w);
}

std::optional<NullDistribution> load_null(const std::string& path) {
  if (path.empty()) return std::nullopt;
  try {
    return io::null_from_json(json::parse(io::read_file(path)));
  } catch (const json::parse_error& e) {
    throw InputError("null file '" + path + "': " + e.what());
  }
}

std::string stars(const SmaupResult& r) {
  if (r.rejected(0.01)) return "***";
  if (r.rejected(0.05)) return "**";
  if (r.rejected(0.1)) return "*";
  return "";
}

std::string result_table(const SmaupResult& r, const std::string& label) {
  std::ostringstream s;
  const double cv = r.critical_values.at(r.alpha);
  s << "Variable     N      k      rho       M         M_crit    pseudo-p\n";
  char line[160];
  std::snprintf(line, sizeof line, "%-12s %-6d %-6d %-9.3f %-9.5f %-9.5f %s %s\n", label.c_str(), r.n, r.k,
                r.rho_used, r.m_value, cv, r.pseudo_p ? fmt("%.3f", *r.pseudo_p).c_str() : "-", stars(r).c_str());
  s << line;
  s << "theta = " << fmt("%.5f", r.theta) << ", rho " << (r.rho_estimated ? "estimated" : "supplied") << "\n";
  for (const auto& [a, v] : r.critical_values) {
    s << "alpha = " << fmt("%g", a) << ": critical value " << fmt("%.5f", v) << ", "
      << (r.decision.at(a) ? "rejected" : "not rejected");
    if (r.pseudo_p) s << "; pseudo-p rule: " << (r.pseudo_decision.at(a) ? "rejected" : "not rejected");
    s << "\n";
  }
  s << "*** p < 0.01, ** p < 0.05, * p < 0.1\n";
  return s.str();
}

void add_format(CLI::App* cmd, std::string& format, std::vector<std::string> allowed) {
  cmd->add_option("--format", format, "Output format")->check(CLI::IsMember(std::move(allowed)));
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"S-maup: sensitivity of spatially intensive variables to areal aggregation", "smaup"};
  app.require_subcommand(1);
  app.set_version_flag("--version", io::toolkit_version());
  const Emitter emit{out, err};

  std::function<void()> action;
  std::string output;
  std::optional<std::uint64_t> seed;
  std::size_t workers = default_worker_count();

  // weights -----------------------------------------------------------------
  auto* weights_cmd = app.add_subcommand("weights", "Build spatial weights (JSON)");
  std::vector<std::size_t> lattice;
  std::string adjacency_path, geojson_path;
  bool raw = false;
  {
    auto* lat = weights_cmd->add_option("--lattice", lattice, "Rook lattice ROWS COLS")->expected(2);
    auto* adj = weights_cmd->add_option("--adjacency", adjacency_path, "Adjacency-list text file");
    auto* geo = weights_cmd->add_option("--geojson", geojson_path, "GeoJSON FeatureCollection of polygons");
    lat->excludes(adj, geo);
    adj->excludes(geo);
    weights_cmd->add_flag("--raw", raw, "Binary weights instead of row-standardized");
    weights_cmd->add_option("-o,--output", output, "Output file (default: stdout)");
    weights_cmd->callback([&] {
      action = [&] {
        const int chosen = (!lattice.empty()) + (!adjacency_path.empty()) + (!geojson_path.empty());
        if (chosen != 1) throw InputError("give exactly one of --lattice, --adjacency, --geojson");
        std::size_t repaired = 0;
        std::optional<SpatialWeights> w;
        if (!lattice.empty()) {
          w = build_lattice_rook(lattice[0], lattice[1], !raw);
        } else if (!adjacency_path.empty()) {
          auto load = from_adjacency_text(io::read_file(adjacency_path), !raw);
          repaired = load.repaired_edges;
          w = std::move(load.weights);
        } else {
          w = from_geojson(io::read_file(geojson_path), !raw);
        }
        std::ostream& summary = output.empty() ? err : out;
        summary << "n=" << w->n() << " edges=" << w->edge_count()
                << " connected=" << (is_connected(*w) ? "yes" : "no") << "\n";
        if (repaired) err << "warning: added " << repaired << " missing reciprocal edge(s)\n";
        emit.emit(output, io::to_json(*w).dump() + "\n");
      };
    });
  }

  // simulate ----------------------------------------------------------------
  auto* sim_cmd = app.add_subcommand("simulate", "Draw a SAR field (CSV)");
  std::string weights_path;
  double rho = 0.0;
  {
    auto* lat = sim_cmd->add_option("--lattice", lattice, "Rook lattice ROWS COLS")->expected(2);
    auto* wts = sim_cmd->add_option("--weights", weights_path, "Weights JSON");
    lat->excludes(wts);
    sim_cmd->add_option("--rho", rho, "Autoregressive parameter")->required();
    sim_cmd->add_option("--seed", seed, "Master seed");
    sim_cmd->add_option("-o,--output", output, "Output CSV (default: stdout)");
    sim_cmd->callback([&] {
      action = [&] {
        if (lattice.empty() == weights_path.empty()) throw InputError("give exactly one of --lattice, --weights");
        const auto w = lattice.empty() ? load_weights(weights_path) : build_lattice_rook(lattice[0], lattice[1]);
        const auto s = resolve_seed(seed, err);
        const auto y = generate_sar(w, {rho, s});
        const json config = {{"command", "simulate"}, {"rho", rho}, {"n", w.n()}, {"weights_id", w.id()}};
        emit.emit(output, io::values_to_csv(y.values(), io::provenance_comment(s, config)));
      };
    });
  }

  // permute-rho -------------------------------------------------------------
  auto* perm_cmd = app.add_subcommand("permute-rho", "Rank-permute values toward a target rho");
  std::string values_path;
  double target = 0.0, window = 0.5;
  int max_retries = 100;
  {
    perm_cmd->add_option("--values", values_path, "Values CSV")->required();
    perm_cmd->add_option("--weights", weights_path, "Weights JSON")->required();
    perm_cmd->add_option("--target", target, "Target rho")->required();
    perm_cmd->add_option("--window", window, "Acceptance half-width")->capture_default_str();
    perm_cmd->add_option("--max-retries", max_retries, "Reference fields to try")->capture_default_str();
    perm_cmd->add_option("--seed", seed, "Master seed");
    perm_cmd->add_option("-o,--output", output, "Output CSV (default: stdout)");
    perm_cmd->callback([&] {
      action = [&] {
        const auto w = load_weights(weights_path);
        const auto y = load_values(values_path, w);
        const auto s = resolve_seed(seed, err);
        const auto res = generate_with_target_rho(w, y, target, window, max_retries, s);
        err << "estimated rho " << fmt("%.5f", res.estimated_rho) << " after " << res.attempts << " attempt(s)\n";
        const json config = {{"command", "permute-rho"}, {"target", target}, {"window", window}, {"weights_id", w.id()}};
        emit.emit(output, io::values_to_csv(res.variable.values(), io::provenance_comment(s, config)));
      };
    });
  }

  // aggregate ---------------------------------------------------------------
  auto* agg_cmd = app.add_subcommand("aggregate", "Random contiguous regionalization (CSV)");
  int k = 0;
  std::string means_path;
  {
    agg_cmd->add_option("--weights", weights_path, "Weights JSON")->required();
    agg_cmd->add_option("--k", k, "Number of regions")->required();
    agg_cmd->add_option("--values", values_path, "Values CSV to aggregate");
    agg_cmd->add_option("--means", means_path, "Write region means here (needs --values)");
    agg_cmd->add_option("--seed", seed, "Master seed");
    agg_cmd->add_option("-o,--output", output, "Regionalization CSV (default: stdout)");
    agg_cmd->callback([&] {
      action = [&] {
        const auto w = load_weights(weights_path);
        const auto s = resolve_seed(seed, err);
        const auto r = random_regions(w, k, s);
        const json config = {{"command", "aggregate"}, {"k", k}, {"weights_id", w.id()}};
        const auto comment = io::provenance_comment(s, config);
        emit.emit(output, io::regionalization_to_csv(r, comment));
        if (!means_path.empty()) {
          if (values_path.empty()) throw InputError("--means needs --values");
          const auto y = load_values(values_path, w);
          io::write_file(means_path, io::values_to_csv(aggregate_mean(y.values(), r).region_means, comment));
        }
      };
    });
  }

  // test --------------------------------------------------------------------
  auto* test_cmd = app.add_subcommand("test", "Run the S-maup test for one k");
  std::string null_path, format = "table", fmt_json = "json", fmt_csv = "csv", label = "y";
  std::optional<double> rho_override;
  double alpha = 0.05;
  bool bilinear = false;
  {
    test_cmd->add_option("--values", values_path, "Values CSV")->required();
    test_cmd->add_option("--weights", weights_path, "Weights JSON")->required();
    test_cmd->add_option("--k", k, "Number of regions")->required();
    test_cmd->add_option("--null", null_path, "Null distribution JSON for a pseudo-p");
    test_cmd->add_option("--rho", rho_override, "Use this rho instead of estimating it");
    test_cmd->add_option("--alpha", alpha, "Significance level (0.01, 0.05, 0.1)")->capture_default_str();
    test_cmd->add_option("--label", label, "Variable name in the table");
    test_cmd->add_flag("--bilinear", bilinear, "Interpolate critical values instead of snapping");
    add_format(test_cmd, format, {"table", "json"});
    test_cmd->add_option("-o,--output", output, "Output file (default: stdout)");
    test_cmd->callback([&] {
      action = [&] {
        const auto w = load_weights(weights_path);
        const auto y = load_values(values_path, w);
        const auto null = load_null(null_path);
        SmaupOptions opts;
        opts.rho_override = rho_override;
        opts.lookup = bilinear ? CriticalLookup::Bilinear : CriticalLookup::Nearest;
        const auto r = smaup_test(y, w, k, alpha, null ? &*null : nullptr, opts);
        emit.emit(output, format == "json" ? io::to_json(r, opts.params).dump(2) + "\n" : result_table(r, label));
      };
    });
  }

  // scan --------------------------------------------------------------------
  auto* scan_cmd = app.add_subcommand("scan", "Scan k for the smallest safe aggregation level");
  int k_min = 1, k_max = 0;
  {
    scan_cmd->add_option("--values", values_path, "Values CSV")->required();
    scan_cmd->add_option("--weights", weights_path, "Weights JSON")->required();
    scan_cmd->add_option("--alpha", alpha, "Significance level (0.01, 0.05, 0.1)")->capture_default_str();
    scan_cmd->add_option("--k-min", k_min, "Smallest k to scan")->capture_default_str();
    scan_cmd->add_option("--k-max", k_max, "Largest k to scan (default: n)");
    scan_cmd->add_option("--null", null_path, "Null distribution JSON (decide by pseudo-p)");
    scan_cmd->add_option("--rho", rho_override, "Use this rho instead of estimating it");
    add_format(scan_cmd, format, {"table", "json"});
    scan_cmd->add_option("-o,--output", output, "Output file (default: stdout)");
    scan_cmd->callback([&] {
      action = [&] {
        const auto w = load_weights(weights_path);
        const auto y = load_values(values_path, w);
        const auto null = load_null(null_path);
        SmaupOptions opts;
        opts.rho_override = rho_override;
        const int hi = k_max > 0 ? k_max : static_cast<int>(w.n());
        const auto rows = scan_k(y, w, alpha, k_min, hi, null ? &*null : nullptr, opts);
        std::optional<int> verdict;
        for (const auto& row : rows) {
          if (row.result.rejected()) break;
          verdict = row.k;
        }
        if (format == "json") {
          emit.emit(output, io::to_json(rows, verdict, opts.params).dump(2) + "\n");
          return;
        }
        std::ostringstream s;
        s << "N = " << w.n() << ", rho = " << fmt("%.3f", rows.front().result.rho_used) << ", alpha = " << fmt("%g", alpha)
          << "\n";
        s << "k       M         " << (null ? "pseudo-p" : "M_crit  ") << "  decision\n";
        char line[128];
        for (const auto& row : rows) {
          const auto& r = row.result;
          const double third = null ? *r.pseudo_p : r.critical_values.at(alpha);
          std::snprintf(line, sizeof line, "%-7d %-9.5f %-9.5f %-12s %s\n", row.k, r.m_value, third,
                        r.rejected() ? "rejected" : "not rejected", stars(r).c_str());
          s << line;
        }
        if (verdict)
          s << "min safe k: " << *verdict << "\n";
        else
          s << "min safe k: no safe k (rejected at k = " << hi << ")\n";
        emit.emit(output, s.str());
      };
    });
  }

  // null --------------------------------------------------------------------
  auto* null_cmd = app.add_subcommand("null", "Simulate a null distribution of M (JSON)");
  int n_areas = 0, replicates = 1000, r_aggs = 30;
  bool reuse_rho = false;
  std::string levene_center = "mean";
  const std::map<std::string, stats::LeveneCenter> centers{{"mean", stats::LeveneCenter::Mean},
                                                           {"median", stats::LeveneCenter::Median}};
  std::uint64_t stall_window = experiments::InstanceConfig{}.stall_window;
  {
    auto* nopt = null_cmd->add_option("--n", n_areas, "Number of areas (most square lattice)");
    auto* lat = null_cmd->add_option("--lattice", lattice, "Rook lattice ROWS COLS")->expected(2);
    auto* wts = null_cmd->add_option("--weights", weights_path, "Weights JSON");
    nopt->excludes(lat, wts);
    lat->excludes(wts);
    null_cmd->add_option("--rho", rho, "Generating rho")->required();
    null_cmd->add_option("--replicates", replicates, "Accepted instances")->capture_default_str();
    null_cmd->add_option("--r", r_aggs, "Aggregations per instance")->capture_default_str();
    null_cmd->add_flag("--reuse-rho", reuse_rho, "Use the generating rho instead of re-estimating");
    null_cmd->add_option("--levene-center", levene_center, "Levene centring inside the filter")
        ->check(CLI::IsMember({"mean", "median"}));
    null_cmd->add_option("--stall-window", stall_window, "Attempts without acceptance before giving up");
    null_cmd->add_option("--seed", seed, "Master seed");
    null_cmd->add_option("--workers", workers, "Worker threads")->check(CLI::PositiveNumber);
    null_cmd->add_option("-o,--output", output, "Output JSON (default: stdout)");
    null_cmd->callback([&] {
      action = [&] {
        const int chosen = (n_areas > 0) + (!lattice.empty()) + (!weights_path.empty());
        if (chosen != 1) throw InputError("give exactly one of --n, --lattice, --weights");
        const auto w = n_areas > 0          ? experiments::lattice_for(n_areas)
                       : !lattice.empty() ? build_lattice_rook(lattice[0], lattice[1])
                                          : load_weights(weights_path);
        experiments::NullConfig cfg;
        cfg.n = static_cast<int>(w.n());
        cfg.rho = rho;
        cfg.replicates = replicates;
        cfg.master_seed = resolve_seed(seed, err);
        cfg.workers = workers;
        cfg.instance.r = r_aggs;
        cfg.instance.reuse_generating_rho = reuse_rho;
        cfg.instance.stall_window = stall_window;
        cfg.instance.levene_center = centers.at(levene_center);
        const auto d = experiments::generate_null(w, cfg);
        const json config = {{"command", "null"}, {"n", cfg.n}, {"rho", rho}, {"replicates", replicates},
                             {"r", r_aggs}, {"reuse_rho", reuse_rho}, {"weights_id", w.id()}};
        json j = io::to_json(d);
        j.update(io::provenance(cfg.master_seed, config));
        emit.emit(output, j.dump() + "\n");
      };
    });
  }

  // power / size ------------------------------------------------------------
  std::vector<int> n_list;
  std::vector<double> rho_list;
  int instances = 0;
  auto add_power_size = [&](const std::string& name, bool power) {
    auto* cmd = app.add_subcommand(name, power ? "Estimate the power of the test" : "Estimate the size of the test");
    cmd->add_option("--n", n_list, "Numbers of areas")->delimiter(',')->required();
    cmd->add_option("--rho", rho_list, "Generating rhos")->delimiter(',')->required();
    cmd->add_option("--instances", instances, "Accepted instances per cell")->required();
    cmd->add_option("--alpha", alpha, "Significance level")->capture_default_str();
    cmd->add_option("--r", r_aggs, "Aggregations per instance")->capture_default_str();
    cmd->add_flag("--reuse-rho", reuse_rho, "Use the generating rho instead of re-estimating");
    cmd->add_option("--levene-center", levene_center, "Levene centring inside the filter")
        ->check(CLI::IsMember({"mean", "median"}));
    cmd->add_option("--stall-window", stall_window, "Attempts without acceptance before giving up");
    cmd->add_option("--seed", seed, "Master seed");
    cmd->add_option("--workers", workers, "Worker threads")->check(CLI::PositiveNumber);
    add_format(cmd, fmt_json, {"json", "csv"});
    cmd->add_option("-o,--output", output, "Output file (default: stdout)");
    cmd->callback([&, power] {
      action = [&, power] {
        experiments::PowerSizeConfig cfg;
        cfg.n_list = n_list;
        cfg.rho_list = rho_list;
        cfg.instances = instances;
        cfg.alpha = alpha;
        cfg.master_seed = resolve_seed(seed, err);
        cfg.workers = workers;
        cfg.instance.r = r_aggs;
        cfg.instance.reuse_generating_rho = reuse_rho;
        cfg.instance.stall_window = stall_window;
        cfg.instance.levene_center = centers.at(levene_center);
        const auto report = power ? experiments::power_experiment(cfg) : experiments::size_experiment(cfg);
        emit.emit(output, fmt_json == "csv" ? io::power_size_to_csv(report) : io::to_json(report).dump(2) + "\n");
      };
    });
  };
  add_power_size("power", true);
  add_power_size("size", false);

  // effects -----------------------------------------------------------------
  auto* eff_cmd = app.add_subcommand("effects", "MAUP effects on the mean and variance");
  std::vector<std::string> k_specs;
  bool independent = false;
  {
    eff_cmd->add_option("--n", n_list, "Numbers of areas")->delimiter(',');
    eff_cmd->add_option("--rho", rho_list, "Rhos")->delimiter(',');
    eff_cmd->add_option("--k", k_specs, "Region counts per N as N:k1,k2,... (repeatable)");
    eff_cmd->add_option("--instances", instances, "Instances per cell (default 50)");
    eff_cmd->add_option("--r", r_aggs, "Aggregations per instance")->capture_default_str();
    eff_cmd->add_option("--window", window, "Target-rho acceptance half-width")->capture_default_str();
    eff_cmd->add_option("--max-retries", max_retries, "Target-rho attempts")->capture_default_str();
    eff_cmd->add_flag("--independent", independent, "Independent SAR draws per rho instead of permutations");
    eff_cmd->add_option("--seed", seed, "Master seed");
    eff_cmd->add_option("--workers", workers, "Worker threads")->check(CLI::PositiveNumber);
    add_format(eff_cmd, fmt_json, {"json", "csv"});
    eff_cmd->add_option("-o,--output", output, "Output file (default: stdout)");
    eff_cmd->callback([&] {
      action = [&] {
        experiments::EffectsConfig cfg;
        cfg.n_list = n_list.empty() ? experiments::design_n_list() : n_list;
        cfg.rho_list = rho_list.empty() ? experiments::design_rho_list() : rho_list;
        cfg.instances = instances > 0 ? instances : 50;
        cfg.r = r_aggs;
        cfg.window = window;
        cfg.max_retries = max_retries;
        cfg.rho_isolation = !independent;
        cfg.master_seed = resolve_seed(seed, err);
        cfg.workers = workers;
        for (const auto& item_spec : k_specs) {
          const auto colon = item_spec.find(':');
          if (colon == std::string::npos) throw InputError("--k expects N:k1,k2,..., got '" + item_spec + "'");
          std::vector<int> ks;
          try {
            const int n = std::stoi(item_spec.substr(0, colon));
            std::stringstream list(item_spec.substr(colon + 1));
            for (std::string item; std::getline(list, item, ',');) ks.push_back(std::stoi(item));
            cfg.k_lists[n] = ks;
          } catch (const std::logic_error&) {
            throw InputError("--k expects N:k1,k2,..., got '" + item_spec + "'");
          }
        }
        const auto summary = experiments::effects_experiment(cfg);
        for (const auto& w : summary.warnings) err << "warning: " << w << "\n";
        emit.emit(output, fmt_json == "csv" ? io::effects_to_csv(summary) : io::to_json(summary).dump(2) + "\n");
      };
    });
  }

  // export-critical-values --------------------------------------------------
  auto* export_cmd = app.add_subcommand("export-critical-values", "Write the embedded critical-value table");
  {
    add_format(export_cmd, fmt_csv, {"csv", "json"});
    export_cmd->add_option("-o,--output", output, "Output file (default: stdout)");
    export_cmd->callback([&] {
      action = [&] {
        const auto& table = CriticalValueTable::embedded();
        if (fmt_csv == "json") {
          json rows = json::array();
          for (const auto& e : table.entries())
            rows.push_back({{"rho", e.rho}, {"n", e.n}, {"alpha", e.alpha}, {"value", e.value}});
          emit.emit(output, json{{"version", CriticalValueTable::kVersion}, {"entries", rows}}.dump(2) + "\n");
        } else {
          emit.emit(output, table.to_csv());
        }
      };
    });
  }

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::CallForVersion& e) {
    out << io::toolkit_version() << "\n";
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kConfigError;
  }

  try {
    if (action) action();
    return kOk;
  } catch (const StallError& e) {
    err << "error: experiment stalled: " << e.what() << "\n";
    return kStall;
  } catch (const InputError& e) {
    err << "error: " << e.what() << "\n";
    return kConfigError;
  } catch (const NumericalError& e) {
    err << "error: numerical failure: " << e.what() << "\n";
    return kNumericalError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kNumericalError;
  }
}

}  // namespace smaup::cli
