#pragma once

// Simulation configuration: defaults, flat key=value file parsing, validation
// and the key echo that makes every output self-describing.

#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <type_traits>
#include <vector>

#include "mlo/mac.hpp"
#include "mlo/phy.hpp"
#include "mlo/types.hpp"

namespace mlo {

inline PolicyKind parse_policy(std::string_view s) {
  for (PolicyKind p : {PolicyKind::MLSA, PolicyKind::SLCI, PolicyKind::MCAA, PolicyKind::VDS,
                       PolicyKind::SL, PolicyKind::MBSL})
    if (to_string(p) == s) return p;
  throw ConfigError("unknown policy '" + std::string(s) + "' (expected mlsa|slci|mcaa|vds|sl|mbsl)");
}

inline Band parse_band(std::string_view s) {
  if (s == "2.4" || s == "B2G4") return Band::B2G4;
  if (s == "5" || s == "B5G") return Band::B5G;
  if (s == "6" || s == "B6G") return Band::B6G;
  throw ConfigError("unknown band '" + std::string(s) + "' (expected 2.4|5|6)");
}

inline std::string band_label(Band b) {
  switch (b) {
    case Band::B2G4: return "2.4";
    case Band::B5G: return "5";
    case Band::B6G: return "6";
  }
  return "?";
}

struct SimConfig {
  // Evaluation setup
  std::array<BandSpec, kNumBands> bands = default_band_specs();
  double ap_tx_power_dbm = 20.0;
  double sta_tx_power_dbm = 15.0;
  double noise_figure_db = 7.0;
  int spatial_streams = 2;
  double t_on_s = 3.0;
  double t_off_s = 1.0;
  double sim_time_s = 120.0;
  int n_deployments = 500;
  PhyModel phy;
  MacOverhead mac;

  // Scenario and load knobs
  int n_bss = 5;
  double area_side_m = 20.0;
  int stations_per_bss = 10;
  double video_rate_mbps = 20.0;
  double data_rate_mbps = 5.0;
  double video_ratio = 0.5;
  double placement_radius_m = 6.0;  // 0: 2.4 GHz coverage radius of the AP
  std::string mcs_table_path;
  Band sl_band = Band::B5G;
  std::uint64_t base_seed = 1;
  PolicyKind policy_under_test = PolicyKind::SLCI;

  // Run parameters
  std::vector<PolicyKind> policies{PolicyKind::MLSA, PolicyKind::SLCI, PolicyKind::MCAA,
                                   PolicyKind::VDS, PolicyKind::SL, PolicyKind::MBSL};
  std::string out_dir = "out";
  int workers = 1;
  bool emit_summary = true;

  const BandSpec& band(Band b) const { return bands[index_of(b)]; }
};

namespace detail {

template <class T>
T parse_number(const std::string& key, const std::string& text) {
  T value{};
  const char* first = text.data();
  const char* last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last)
    throw ConfigError(key + ": cannot parse '" + text + "' as a number");
  return value;
}

inline bool parse_bool(const std::string& key, const std::string& text) {
  if (text == "1" || text == "true" || text == "yes") return true;
  if (text == "0" || text == "false" || text == "no") return false;
  throw ConfigError(key + ": cannot parse '" + text + "' as a boolean");
}

inline std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

struct ConfigKey {
  std::string name;
  std::function<void(SimConfig&, const std::string&)> set;
  std::function<std::string(const SimConfig&)> get;
};

template <class T>
std::string format_value(const T& v) {
  if constexpr (std::is_same_v<T, bool>)
    return v ? "true" : "false";
  else if constexpr (std::is_floating_point_v<T>)
    return format_double(v);
  else
    return std::to_string(v);
}

// `field` maps a (const or mutable) config to the member it names.
template <class Field>
ConfigKey field_key(std::string name, Field field) {
  return {name,
          [name, field](SimConfig& c, const std::string& v) {
            auto& ref = field(c);
            using T = std::remove_reference_t<decltype(ref)>;
            if constexpr (std::is_same_v<T, bool>)
              ref = parse_bool(name, v);
            else
              ref = parse_number<T>(name, v);
          },
          [field](const SimConfig& c) { return format_value(field(c)); }};
}

#define MLO_FIELD(expr) [](auto& c) -> auto& { return c.expr; }

inline std::string policy_list_string(const std::vector<PolicyKind>& ps) {
  std::string s;
  for (std::size_t i = 0; i < ps.size(); ++i) {
    if (i) s += ',';
    s += to_string(ps[i]);
  }
  return s;
}

inline std::vector<PolicyKind> parse_policy_list(const std::string& text) {
  std::vector<PolicyKind> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(parse_policy(item));
  }
  if (out.empty()) throw ConfigError("policies: list is empty");
  return out;
}

inline const std::vector<ConfigKey>& config_keys() {
  static const std::vector<ConfigKey> keys = [] {
    std::vector<ConfigKey> k;
    k.push_back(field_key("carrier_ghz_2g4", MLO_FIELD(bands[0].carrier_ghz)));
    k.push_back(field_key("carrier_ghz_5g", MLO_FIELD(bands[1].carrier_ghz)));
    k.push_back(field_key("carrier_ghz_6g", MLO_FIELD(bands[2].carrier_ghz)));
    k.push_back(field_key("bandwidth_mhz_2g4", MLO_FIELD(bands[0].bandwidth_mhz)));
    k.push_back(field_key("bandwidth_mhz_5g", MLO_FIELD(bands[1].bandwidth_mhz)));
    k.push_back(field_key("bandwidth_mhz_6g", MLO_FIELD(bands[2].bandwidth_mhz)));
    k.push_back(field_key("channel_2g4", MLO_FIELD(bands[0].channel_id)));
    k.push_back(field_key("channel_5g", MLO_FIELD(bands[1].channel_id)));
    k.push_back(field_key("channel_6g", MLO_FIELD(bands[2].channel_id)));
    k.push_back(field_key("ap_tx_power_dbm", MLO_FIELD(ap_tx_power_dbm)));
    k.push_back(field_key("sta_tx_power_dbm", MLO_FIELD(sta_tx_power_dbm)));
    k.push_back(field_key("cca_threshold_dbm", MLO_FIELD(phy.cca_threshold_dbm)));
    k.push_back(field_key("noise_figure_db", MLO_FIELD(noise_figure_db)));
    k.push_back(field_key("noise_floor_dbm_hz", MLO_FIELD(phy.noise_floor_dbm_hz)));
    k.push_back(field_key("spatial_streams", MLO_FIELD(spatial_streams)));
    k.push_back(field_key("pathloss_l0_db", MLO_FIELD(phy.pathloss.l0_db)));
    k.push_back(field_key("pathloss_exponent_near", MLO_FIELD(phy.pathloss.exponent_near)));
    k.push_back(field_key("pathloss_exponent_far", MLO_FIELD(phy.pathloss.exponent_far)));
    k.push_back(field_key("pathloss_breakpoint_m", MLO_FIELD(phy.pathloss.breakpoint_m)));
    k.push_back(field_key("wall_attenuation_db", MLO_FIELD(phy.pathloss.wall_attenuation_db)));
    k.push_back(field_key("wall_spacing_m", MLO_FIELD(phy.pathloss.wall_spacing_m)));
    k.push_back(field_key("wall_freq_exponent", MLO_FIELD(phy.pathloss.wall_freq_exponent)));
    k.push_back(field_key("d_min_m", MLO_FIELD(phy.pathloss.d_min_m)));
    k.push_back(field_key("mpdu_payload_bytes", MLO_FIELD(mac.mpdu_payload_bytes)));
    k.push_back(field_key("ampdu_frames", MLO_FIELD(mac.ampdu_frames)));
    k.push_back(field_key("cw_min", MLO_FIELD(mac.cw_min)));
    k.push_back(field_key("per", MLO_FIELD(mac.per)));
    k.push_back(field_key("slot_time_us", MLO_FIELD(mac.slot_time_us)));
    k.push_back(field_key("sifs_us", MLO_FIELD(mac.sifs_us)));
    k.push_back(field_key("difs_us", MLO_FIELD(mac.difs_us)));
    k.push_back(field_key("preamble_and_headers_us", MLO_FIELD(mac.preamble_and_headers_us)));
    k.push_back(field_key("ack_time_us", MLO_FIELD(mac.ack_time_us)));
    k.push_back(field_key("t_on_s", MLO_FIELD(t_on_s)));
    k.push_back(field_key("t_off_s", MLO_FIELD(t_off_s)));
    k.push_back(field_key("sim_time_s", MLO_FIELD(sim_time_s)));
    k.push_back(field_key("n_deployments", MLO_FIELD(n_deployments)));
    k.push_back(field_key("n_bss", MLO_FIELD(n_bss)));
    k.push_back(field_key("area_side_m", MLO_FIELD(area_side_m)));
    k.push_back(field_key("stations_per_bss", MLO_FIELD(stations_per_bss)));
    k.push_back(field_key("video_rate_mbps", MLO_FIELD(video_rate_mbps)));
    k.push_back(field_key("data_rate_mbps", MLO_FIELD(data_rate_mbps)));
    k.push_back(field_key("video_ratio", MLO_FIELD(video_ratio)));
    k.push_back(field_key("placement_radius_m", MLO_FIELD(placement_radius_m)));
    k.push_back(field_key("base_seed", MLO_FIELD(base_seed)));
    k.push_back(field_key("workers", MLO_FIELD(workers)));
    k.push_back(field_key("emit_summary", MLO_FIELD(emit_summary)));
    k.push_back({"mcs_table_path",
                 [](SimConfig& c, const std::string& v) { c.mcs_table_path = v; },
                 [](const SimConfig& c) { return c.mcs_table_path; }});
    k.push_back({"sl_band", [](SimConfig& c, const std::string& v) { c.sl_band = parse_band(v); },
                 [](const SimConfig& c) { return band_label(c.sl_band); }});
    k.push_back({"policy_under_test",
                 [](SimConfig& c, const std::string& v) { c.policy_under_test = parse_policy(v); },
                 [](const SimConfig& c) { return std::string(to_string(c.policy_under_test)); }});
    k.push_back({"policies",
                 [](SimConfig& c, const std::string& v) { c.policies = parse_policy_list(v); },
                 [](const SimConfig& c) { return policy_list_string(c.policies); }});
    k.push_back({"out_dir", [](SimConfig& c, const std::string& v) { c.out_dir = v; },
                 [](const SimConfig& c) { return c.out_dir; }});
    return k;
  }();
  return keys;
}

#undef MLO_FIELD

}  // namespace detail

/// Assigns one key. Unknown keys are rejected.
inline void set_config_value(SimConfig& config, const std::string& key, const std::string& value) {
  for (const auto& k : detail::config_keys())
    if (k.name == key) {
      k.set(config, detail::trim(value));
      return;
    }
  throw ConfigError("unknown config key '" + key + "'");
}

/// Every key with its effective value, in registry order.
inline std::vector<std::pair<std::string, std::string>> config_echo(const SimConfig& config) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& k : detail::config_keys()) out.emplace_back(k.name, k.get(config));
  return out;
}

inline void validate(const SimConfig& c) {
  auto require = [](bool ok, const std::string& key, const std::string& constraint) {
    if (!ok) throw ConfigError(key + ": must satisfy " + constraint);
  };
  require(c.n_deployments >= 1, "n_deployments", ">= 1");
  require(c.sim_time_s > 0.0, "sim_time_s", "> 0");
  require(c.t_on_s > 0.0, "t_on_s", "> 0");
  require(c.t_off_s > 0.0, "t_off_s", "> 0");
  require(c.video_rate_mbps > 0.0, "video_rate_mbps", "> 0");
  require(c.data_rate_mbps > 0.0, "data_rate_mbps", "> 0");
  require(c.video_ratio >= 0.0 && c.video_ratio <= 1.0, "video_ratio", "in [0,1]");
  require(c.stations_per_bss >= 1, "stations_per_bss", ">= 1");
  require(c.n_bss >= 1 && c.n_bss <= 64, "n_bss", "in [1,64]");
  require(c.area_side_m > 0.0, "area_side_m", "> 0");
  require(c.placement_radius_m >= 0.0, "placement_radius_m", ">= 0 (0 selects the 2.4 GHz coverage radius)");
  require(c.spatial_streams >= 1, "spatial_streams", ">= 1");
  require(c.mac.per >= 0.0 && c.mac.per < 1.0, "per", "in [0,1)");
  require(c.mac.mpdu_payload_bytes >= 1, "mpdu_payload_bytes", ">= 1");
  require(c.mac.ampdu_frames >= 1, "ampdu_frames", ">= 1");
  require(c.mac.cw_min >= 0, "cw_min", ">= 0");
  require(c.mac.slot_time_us >= 0.0, "slot_time_us", ">= 0");
  require(c.mac.sifs_us >= 0.0, "sifs_us", ">= 0");
  require(c.mac.difs_us >= 0.0, "difs_us", ">= 0");
  require(c.mac.preamble_and_headers_us >= 0.0, "preamble_and_headers_us", ">= 0");
  require(c.mac.ack_time_us >= 0.0, "ack_time_us", ">= 0");
  require(c.phy.pathloss.d_min_m > 0.0, "d_min_m", "> 0");
  require(c.phy.pathloss.breakpoint_m >= c.phy.pathloss.d_min_m, "pathloss_breakpoint_m", ">= d_min_m");
  require(c.phy.pathloss.exponent_near > 0.0, "pathloss_exponent_near", "> 0");
  require(c.phy.pathloss.exponent_far > 0.0, "pathloss_exponent_far", "> 0");
  require(c.phy.pathloss.wall_attenuation_db >= 0.0, "wall_attenuation_db", ">= 0");
  require(c.phy.pathloss.wall_spacing_m >= 0.0, "wall_spacing_m", ">= 0");
  for (const BandSpec& b : c.bands) {
    require(b.carrier_ghz > 0.0, "carrier_ghz_" + std::string(to_string(b.band)), "> 0");
    require(b.bandwidth_mhz == 20.0 || b.bandwidth_mhz == 40.0 || b.bandwidth_mhz == 80.0 ||
                b.bandwidth_mhz == 160.0,
            "bandwidth_mhz_" + std::string(to_string(b.band)), "one of 20|40|80|160");
  }
  require(!c.policies.empty(), "policies", "non-empty");
  require(c.workers >= 1, "workers", ">= 1");
  validate_mcs_table(c.phy.mcs_table);
}

/// Parses `key = value` lines ('#' starts a comment) on top of `base`.
inline SimConfig parse_config_text(const std::string& text, SimConfig base = {}) {
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
    set_config_value(base, detail::trim(line.substr(0, eq)), line.substr(eq + 1));
  }
  return base;
}

inline SimConfig parse_config_file(const std::string& path, SimConfig base = {}) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str(), std::move(base));
}

/// File values first, then overrides (CLI flags) on top; loads the MCS
/// table if a path is set, then validates.
inline SimConfig parse_config(const std::optional<std::string>& path,
                              const std::vector<std::pair<std::string, std::string>>& overrides) {
  SimConfig c = path ? parse_config_file(*path) : SimConfig{};
  for (const auto& [k, v] : overrides) set_config_value(c, k, v);
  if (!c.mcs_table_path.empty()) c.phy.mcs_table = load_mcs_table(c.mcs_table_path);
  validate(c);
  return c;
}

}  // namespace mlo
