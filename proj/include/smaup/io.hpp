#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "nlohmann/json.hpp"
#include "smaup/experiments.hpp"
#include "smaup/null_distribution.hpp"
#include "smaup/regionalize.hpp"
#include "smaup/smaup_core.hpp"
#include "smaup/spatial_weights.hpp"

namespace smaup::io {

using nlohmann::json;

inline constexpr const char* kToolkitName = "smaup";
const char* toolkit_version();

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view content);

/// 16 hex digits of FNV-1a over the compact dump of `config`.
std::string config_hash(const json& config);

/// {"toolkit": {...}, "master_seed": s, "config_hash": h}
json provenance(std::uint64_t master_seed, const json& config);
/// Single `#` comment line carrying the same information, for CSV outputs.
std::string provenance_comment(std::uint64_t master_seed, const json& config);

// Spatial weights: {n, neighbors, weights, standardized}
json to_json(const SpatialWeights& w);
/// Validates every invariant, including that the weights match the
/// declared mode.
SpatialWeights weights_from_json(const json& j);

// Area variables: one value per line, optional `value` header, `#` comments.
std::vector<double> parse_values_csv(std::string_view text);
std::string values_to_csv(std::span<const double> values, const std::string& comment = {});

// Regionalizations: `area_id,region_id`.
std::string regionalization_to_csv(const Regionalization& r, const std::string& comment = {});
Regionalization parse_regionalization_csv(std::string_view text);

// Null distributions: {n, rho, replicates, seed, values, r_aggregations}
json to_json(const NullDistribution& d);
NullDistribution null_from_json(const json& j);

json to_json(const SmaupParams& p);
json to_json(const SmaupResult& r, const SmaupParams& params);
json to_json(const std::vector<ScanRow>& rows, const std::optional<int>& verdict, const SmaupParams& params);

json to_json(const experiments::EffectsConfig& c);
json to_json(const experiments::EffectsSummary& s);
/// Long format `rho,k_or_N,metric,value`; metric names carry the N as
/// `name@N=<n>`; rcm_bar and rcv_bar get one row per instance.
std::string effects_to_csv(const experiments::EffectsSummary& s);

json to_json(const experiments::PowerSizeConfig& c);
json to_json(const experiments::PowerSizeReport& r);
/// Long format `rho,k_or_N,metric,value` with k_or_N = N.
std::string power_size_to_csv(const experiments::PowerSizeReport& r);

}  // namespace smaup::io
