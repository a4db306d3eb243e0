#include "smaup/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "smaup/error.hpp"

namespace smaup::io {

const char* toolkit_version() { return SMAUP_VERSION; }

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InputError("cannot write '" + path + "'");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw InputError("failed writing '" + path + "'");
}

std::string config_hash(const json& config) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : config.dump()) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

json provenance(std::uint64_t master_seed, const json& config) {
  return {{"toolkit", {{"name", kToolkitName}, {"version", toolkit_version()}}},
          {"master_seed", master_seed},
          {"config_hash", config_hash(config)}};
}

std::string provenance_comment(std::uint64_t master_seed, const json& config) {
  return std::string("# ") + kToolkitName + " " + toolkit_version() + " seed=" + std::to_string(master_seed) +
         " config=" + config_hash(config);
}

json to_json(const SpatialWeights& w) {
  return {{"n", w.n()},
          {"neighbors", w.neighbor_lists()},
          {"weights", w.weight_lists()},
          {"standardized", w.standardized()}};
}

SpatialWeights weights_from_json(const json& j) {
  try {
    const auto n = j.at("n").get<std::size_t>();
    auto nb = j.at("neighbors").get<std::vector<std::vector<int>>>();
    const auto wt = j.at("weights").get<std::vector<std::vector<double>>>();
    const bool standardized = j.at("standardized").get<bool>();
    if (nb.size() != n || wt.size() != n) throw InputError("weights JSON: n does not match list lengths");
    for (std::size_t i = 0; i < n; ++i)
      if (nb[i].size() != wt[i].size()) throw InputError("weights JSON: row " + std::to_string(i) + " length mismatch");
    auto w = SpatialWeights::from_neighbors(std::move(nb), standardized);
    // Rows were sorted on construction; compare weights as multisets.
    for (std::size_t i = 0; i < n; ++i) {
      const auto expect = w.weights(i);
      for (double v : wt[i]) {
        const double e = expect.empty() ? 1.0 : expect[0];
        if (std::abs(v - e) > 1e-12)
          throw InputError("weights JSON: row " + std::to_string(i) + " does not match the " +
                           (standardized ? "row-standardized" : "binary") + " weighting");
      }
    }
    return w;
  } catch (const json::exception& e) {
    throw InputError(std::string("weights JSON: ") + e.what());
  }
}

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

template <typename Fn>
void for_each_line(std::string_view text, Fn&& fn) {
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto eol = text.find('\n');
    std::string_view line = text.substr(0, eol);
    text = eol == std::string_view::npos ? std::string_view{} : text.substr(eol + 1);
    ++line_no;
    line = trim(line);
    if (line.empty() || line.front() == '#') continue;
    fn(line, line_no);
  }
}

double parse_double(std::string_view token, std::size_t line) {
  token = trim(token);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
  if (ec != std::errc() || ptr != token.data() + token.size() || !std::isfinite(v))
    throw ParseError("invalid number '" + std::string(token) + "'", line);
  return v;
}

int parse_int(std::string_view token, std::size_t line) {
  token = trim(token);
  int v = 0;
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
  if (ec != std::errc() || ptr != token.data() + token.size())
    throw ParseError("invalid integer '" + std::string(token) + "'", line);
  return v;
}

std::string format_double(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

}  // namespace

std::vector<double> parse_values_csv(std::string_view text) {
  std::vector<double> out;
  bool first = true;
  for_each_line(text, [&](std::string_view line, std::size_t line_no) {
    if (first && line == "value") {
      first = false;
      return;
    }
    first = false;
    if (line.find(',') != std::string_view::npos) throw ParseError("expected a single column", line_no);
    out.push_back(parse_double(line, line_no));
  });
  if (out.empty()) throw ParseError("values file contains no values");
  return out;
}

std::string values_to_csv(std::span<const double> values, const std::string& comment) {
  std::string out;
  if (!comment.empty()) out += comment + "\n";
  out += "value\n";
  for (double v : values) out += format_double(v) + "\n";
  return out;
}

std::string regionalization_to_csv(const Regionalization& r, const std::string& comment) {
  std::string out;
  if (!comment.empty()) out += comment + "\n";
  out += "area_id,region_id\n";
  for (std::size_t i = 0; i < r.assignment.size(); ++i)
    out += std::to_string(i) + "," + std::to_string(r.assignment[i]) + "\n";
  return out;
}

Regionalization parse_regionalization_csv(std::string_view text) {
  Regionalization r;
  bool first = true;
  int max_label = -1;
  for_each_line(text, [&](std::string_view line, std::size_t line_no) {
    const auto comma = line.find(',');
    if (comma == std::string_view::npos) throw ParseError("expected 'area_id,region_id'", line_no);
    if (first && trim(line.substr(0, comma)) == "area_id") {
      first = false;
      return;
    }
    first = false;
    const int area = parse_int(line.substr(0, comma), line_no);
    const int region = parse_int(line.substr(comma + 1), line_no);
    if (area != static_cast<int>(r.assignment.size()))
      throw ParseError("area ids must be consecutive from 0", line_no);
    if (region < 0) throw ParseError("negative region id", line_no);
    r.assignment.push_back(region);
    max_label = std::max(max_label, region);
  });
  if (r.assignment.empty()) throw ParseError("regionalization file contains no rows");
  r.k = max_label + 1;
  return r;
}

json to_json(const NullDistribution& d) {
  return {{"n", d.n},
          {"rho", d.rho},
          {"replicates", d.replicates},
          {"r_aggregations", d.r_aggregations},
          {"seed", d.master_seed},
          {"values", d.values}};
}

NullDistribution null_from_json(const json& j) {
  try {
    NullDistribution d;
    d.n = j.at("n").get<int>();
    d.rho = j.at("rho").get<double>();
    d.replicates = j.at("replicates").get<int>();
    d.master_seed = j.at("seed").get<std::uint64_t>();
    d.values = j.at("values").get<std::vector<double>>();
    d.r_aggregations = j.value("r_aggregations", 30);
    d.validate();
    return d;
  } catch (const json::exception& e) {
    throw InputError(std::string("null distribution JSON: ") + e.what());
  }
}

json to_json(const SmaupParams& p) {
  return {{"b", p.b}, {"m", p.m}, {"p", p.p}, {"a", p.a}, {"beta0", p.beta0}, {"beta1", p.beta1}};
}

namespace {

std::string level_key(double alpha) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%g", alpha);
  return buf;
}

json result_body(const SmaupResult& r) {
  json cv = json::object(), dec = json::object();
  for (const auto& [a, v] : r.critical_values) cv[level_key(a)] = v;
  for (const auto& [a, v] : r.decision) dec[level_key(a)] = v ? "reject" : "not-reject";
  json j = {{"m_value", r.m_value},   {"theta", r.theta}, {"rho_used", r.rho_used},
            {"rho_estimated", r.rho_estimated}, {"n", r.n}, {"k", r.k},
            {"alpha", r.alpha},       {"critical_values", cv}, {"decision", dec},
            {"rejected", r.rejected()}};
  if (r.pseudo_p) {
    json pd = json::object();
    for (const auto& [a, v] : r.pseudo_decision) pd[level_key(a)] = v ? "reject" : "not-reject";
    j["pseudo_p"] = *r.pseudo_p;
    j["pseudo_decision"] = pd;
  } else {
    j["pseudo_p"] = nullptr;
  }
  return j;
}

}  // namespace

json to_json(const SmaupResult& r, const SmaupParams& params) {
  json j = result_body(r);
  j["toolkit"] = {{"name", kToolkitName}, {"version", toolkit_version()}};
  j["params"] = to_json(params);
  j["critical_value_table"] = CriticalValueTable::kVersion;
  return j;
}

json to_json(const std::vector<ScanRow>& rows, const std::optional<int>& verdict, const SmaupParams& params) {
  json arr = json::array();
  for (const auto& row : rows) arr.push_back(result_body(row.result));
  return {{"toolkit", {{"name", kToolkitName}, {"version", toolkit_version()}}},
          {"params", to_json(params)},
          {"rows", arr},
          {"min_safe_k", verdict ? json(*verdict) : json(nullptr)}};
}

json to_json(const experiments::EffectsConfig& c) {
  json ks = json::object();
  for (const auto& [n, list] : c.k_lists) ks[std::to_string(n)] = list;
  return {{"n_list", c.n_list},         {"rho_list", c.rho_list},   {"k_lists", ks},
          {"instances", c.instances},   {"r", c.r},                 {"rho_isolation", c.rho_isolation},
          {"base_rho", c.base_rho},     {"window", c.window},       {"max_retries", c.max_retries},
          {"alpha", c.alpha},           {"master_seed", c.master_seed}};
}

json to_json(const experiments::EffectsSummary& s) {
  const json config = to_json(s.config);
  json cells = json::array();
  for (const auto& c : s.cells)
    cells.push_back({{"n", c.n},
                     {"rho", c.rho},
                     {"k", c.k},
                     {"rcm_bar", c.rcm_bar},
                     {"rcv_bar", c.rcv_bar},
                     {"t_reject_proportion", c.t_reject_proportion},
                     {"levene_reject_proportion", c.levene_reject_proportion},
                     {"tests", c.tests}});
  json j = provenance(s.config.master_seed, config);
  j["kind"] = "effects";
  j["config"] = config;
  j["cells"] = cells;
  j["warnings"] = s.warnings;
  j["target_rho_fallbacks"] = s.target_rho_fallbacks;
  j["rcm_denominator"] = s.rcm_absolute_denominator ? "abs(mu_o)" : "mu_o";
  return j;
}

std::string effects_to_csv(const experiments::EffectsSummary& s) {
  std::string out = provenance_comment(s.config.master_seed, to_json(s.config)) + "\n";
  out += "rho,k_or_N,metric,value\n";
  for (const auto& c : s.cells) {
    const std::string prefix = format_double(c.rho) + "," + std::to_string(c.k) + ",";
    const std::string tag = "@N=" + std::to_string(c.n) + ",";
    for (double v : c.rcm_bar) out += prefix + "rcm_bar" + tag + format_double(v) + "\n";
    for (double v : c.rcv_bar) out += prefix + "rcv_bar" + tag + format_double(v) + "\n";
    out += prefix + "t_reject_proportion" + tag + format_double(c.t_reject_proportion) + "\n";
    out += prefix + "levene_reject_proportion" + tag + format_double(c.levene_reject_proportion) + "\n";
  }
  return out;
}

json to_json(const experiments::PowerSizeConfig& c) {
  return {{"n_list", c.n_list},
          {"rho_list", c.rho_list},
          {"instances", c.instances},
          {"alpha", c.alpha},
          {"master_seed", c.master_seed},
          {"r", c.instance.r},
          {"levene_alpha", c.instance.levene_alpha},
          {"reuse_generating_rho", c.instance.reuse_generating_rho}};
}

json to_json(const experiments::PowerSizeReport& r) {
  const json config = to_json(r.config);
  json cells = json::array();
  for (const auto& c : r.cells)
    cells.push_back({{"n", c.n},
                     {"rho", c.rho},
                     {"proportion", c.proportion},
                     {"rejections", c.rejections},
                     {"instances", c.instances},
                     {"alpha", c.alpha},
                     {"mean_attempts", c.mean_attempts}});
  json j = provenance(r.config.master_seed, config);
  j["kind"] = r.kind;
  j["config"] = config;
  j["cells"] = cells;
  return j;
}

std::string power_size_to_csv(const experiments::PowerSizeReport& r) {
  std::string out = provenance_comment(r.config.master_seed, to_json(r.config)) + "\n";
  out += "rho,k_or_N,metric,value\n";
  for (const auto& c : r.cells) {
    const std::string prefix = format_double(c.rho) + "," + std::to_string(c.n) + ",";
    out += prefix + r.kind + "," + format_double(c.proportion) + "\n";
    out += prefix + "rejections," + std::to_string(c.rejections) + "\n";
    out += prefix + "instances," + std::to_string(c.instances) + "\n";
    out += prefix + "mean_attempts," + format_double(c.mean_attempts) + "\n";
  }
  return out;
}

}  // namespace smaup::io
