#pragma once

// Random deployment generation: BSS_A's AP at the area centre, the other APs
// uniform over the square, M stations around each AP, per-station enabled
// links and the per-AP allocation policy.

#include <cmath>
#include <map>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "json.hpp"
#include "mlo/config.hpp"
#include "mlo/phy.hpp"
#include "mlo/rng.hpp"
#include "mlo/types.hpp"

namespace mlo {

enum class Role : std::uint8_t { AP, STA };

struct Node {
  int node_id = 0;
  Role role = Role::AP;
  int bss_id = 0;
  Position position;
  double tx_power_dbm = 20.0;
  double noise_figure_db = 7.0;
  int n_spatial_streams = 2;
};

struct Deployment {
  int deployment_index = 0;
  std::uint64_t seed = 0;
  // APs first (node_id == bss_id), then stations grouped by BSS.
  std::vector<Node> nodes;
  std::array<BandSpec, kNumBands> band_specs = default_band_specs();
  std::map<int, BandSet> enabled_links;
  std::map<int, PolicyKind> ap_policies;
  double area_side = 20.0;
  double placement_radius = 0.0;

  std::size_t n_aps() const {
    std::size_t n = 0;
    for (const Node& node : nodes) n += node.role == Role::AP ? 1 : 0;
    return n;
  }
  const Node& ap_of_bss(int bss) const { return nodes.at(static_cast<std::size_t>(bss)); }
  const BandSpec& band(Band b) const { return band_specs[index_of(b)]; }
};

inline constexpr int kCentralBss = 0;

inline Node make_ap(const SimConfig& config, int bss, Position pos) {
  return {bss, Role::AP, bss, pos, config.ap_tx_power_dbm, config.noise_figure_db,
          config.spatial_streams};
}

inline double effective_placement_radius(const SimConfig& config) {
  if (config.placement_radius_m > 0.0) return config.placement_radius_m;
  return coverage_radius(config.ap_tx_power_dbm, config.band(Band::B2G4), config.phy);
}

/// Bands whose downlink rx power at the station meets the CCA threshold.
inline BandSet compute_enabled_links(const Node& sta, const Node& ap,
                                     const std::array<BandSpec, kNumBands>& bands,
                                     const PhyModel& phy) {
  const double d = std::max(distance(sta.position, ap.position), phy.pathloss.d_min_m);
  BandSet out;
  for (const BandSpec& b : bands)
    if (rx_power(ap.tx_power_dbm, d, b, phy) >= phy.cca_threshold_dbm) out.insert(b.band);
  return out;
}

inline constexpr int kPlacementRetries = 10000;

/// Stations uniform over the disk of the placement radius around `ap`,
/// rejection-sampled until they are at least d_min away and hear the AP on
/// 2.4 GHz. Node ids start at `first_node_id`.
inline std::vector<Node> place_stations(const Node& ap, int m_stations, const SimConfig& config,
                                        Rng& rng, int first_node_id) {
  const double radius = effective_placement_radius(config);
  const BandSpec& b24 = config.band(Band::B2G4);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<Node> out;
  out.reserve(static_cast<std::size_t>(m_stations));
  for (int m = 0; m < m_stations; ++m) {
    Node sta{first_node_id + m,       Role::STA,
             ap.bss_id,               ap.position,
             config.sta_tx_power_dbm, config.noise_figure_db,
             config.spatial_streams};
    bool placed = false;
    for (int attempt = 0; attempt < kPlacementRetries && !placed; ++attempt) {
      const double r = radius * std::sqrt(unit(rng));
      const double theta = 2.0 * std::numbers::pi * unit(rng);
      if (r < config.phy.pathloss.d_min_m) continue;
      sta.position = {ap.position.x + r * std::cos(theta), ap.position.y + r * std::sin(theta)};
      placed = rx_power(ap.tx_power_dbm, r, b24, config.phy) >= config.phy.cca_threshold_dbm;
    }
    if (!placed)
      throw PlacementError("no station position within " + std::to_string(radius) +
                           " m of AP " + std::to_string(ap.node_id) +
                           " meets the 2.4 GHz CCA threshold");
    out.push_back(sta);
  }
  return out;
}

inline Deployment generate_deployment(const SimConfig& config, int deployment_index, Rng& rng) {
  Deployment dep;
  dep.deployment_index = deployment_index;
  dep.seed = deployment_seed(config.base_seed, static_cast<std::uint64_t>(deployment_index));
  dep.band_specs = config.bands;
  dep.area_side = config.area_side_m;
  dep.placement_radius = effective_placement_radius(config);

  std::uniform_real_distribution<double> coord(0.0, config.area_side_m);
  const double c = 0.5 * config.area_side_m;
  dep.nodes.push_back(make_ap(config, kCentralBss, {c, c}));
  for (int bss = 1; bss < config.n_bss; ++bss) {
    const double x = coord(rng);
    const double y = coord(rng);
    dep.nodes.push_back(make_ap(config, bss, {x, y}));
  }

  std::bernoulli_distribution coin(0.5);
  dep.ap_policies[kCentralBss] = config.policy_under_test;
  for (int bss = 1; bss < config.n_bss; ++bss)
    dep.ap_policies[bss] = coin(rng) ? PolicyKind::SLCI : PolicyKind::MCAA;

  int next_id = config.n_bss;
  for (int bss = 0; bss < config.n_bss; ++bss) {
    const Node ap = dep.nodes[static_cast<std::size_t>(bss)];
    for (Node& sta : place_stations(ap, config.stations_per_bss, config, rng, next_id)) {
      dep.enabled_links[sta.node_id] = compute_enabled_links(sta, ap, dep.band_specs, config.phy);
      dep.nodes.push_back(sta);
    }
    next_id += config.stations_per_bss;
  }
  return dep;
}

/// Seeds the geometry stream from (base_seed, deployment_index).
inline Deployment generate_deployment(const SimConfig& config, int deployment_index) {
  Rng rng = make_rng(config.base_seed, static_cast<std::uint64_t>(deployment_index), Stream::Geometry);
  return generate_deployment(config, deployment_index, rng);
}

inline ContentionGraph contention_graph(const Deployment& dep, Band band, const PhyModel& phy) {
  std::vector<Position> pos;
  std::vector<double> tx;
  for (const Node& n : dep.nodes)
    if (n.role == Role::AP) {
      pos.push_back(n.position);
      tx.push_back(n.tx_power_dbm);
    }
  return contention_graph(pos, tx, dep.band(band), phy);
}

// Serialization

inline nlohmann::ordered_json to_json(const Deployment& dep) {
  using nlohmann::ordered_json;
  ordered_json j;
  j["deployment_index"] = dep.deployment_index;
  j["seed"] = dep.seed;
  j["area_side"] = dep.area_side;
  j["placement_radius"] = dep.placement_radius;
  ordered_json bands = ordered_json::array();
  for (const BandSpec& b : dep.band_specs)
    bands.push_back({{"band_id", to_string(b.band)},
                     {"carrier_freq", b.carrier_ghz},
                     {"bandwidth", b.bandwidth_mhz},
                     {"channel_id", b.channel_id}});
  j["band_specs"] = bands;
  ordered_json nodes = ordered_json::array();
  for (const Node& n : dep.nodes)
    nodes.push_back({{"node_id", n.node_id},
                     {"role", n.role == Role::AP ? "AP" : "STA"},
                     {"bss_id", n.bss_id},
                     {"position", {n.position.x, n.position.y}},
                     {"tx_power", n.tx_power_dbm},
                     {"noise_figure", n.noise_figure_db},
                     {"n_spatial_streams", n.n_spatial_streams}});
  j["nodes"] = nodes;
  ordered_json links = ordered_json::object();
  for (const auto& [sta, set] : dep.enabled_links) {
    ordered_json arr = ordered_json::array();
    for (Band b : kAllBands)
      if (set.contains(b)) arr.push_back(to_string(b));
    links[std::to_string(sta)] = arr;
  }
  j["enabled_links"] = links;
  ordered_json policies = ordered_json::object();
  for (const auto& [ap, p] : dep.ap_policies) policies[std::to_string(ap)] = to_string(p);
  j["ap_policies"] = policies;
  return j;
}

inline std::string serialize(const Deployment& dep) { return to_json(dep).dump(2); }

}  // namespace mlo
