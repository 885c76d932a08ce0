#pragma once

// Flow-level CSMA/CA abstraction: bit rates become airtime fractions, and
// APs that sense each other share the channel proportionally to demand.

#include <algorithm>
#include <map>
#include <span>
#include <vector>

#include "mlo/graph.hpp"
#include "mlo/types.hpp"

namespace mlo {

struct MacOverhead {
  int mpdu_payload_bytes = 1500;
  double slot_time_us = 9.0;
  double difs_us = 34.0;
  double sifs_us = 16.0;
  double preamble_and_headers_us = 44.0;
  double ack_time_us = 28.0;
  int cw_min = 15;
  double per = 0.10;
  // MPDUs carried per channel access (A-MPDU). 1 = one MPDU per access.
  int ampdu_frames = 3;
};

/// Duration of one access: preamble, payload, SIFS, (block) ACK, DIFS and the mean backoff.
inline double frame_airtime(double payload_bits, double phy_rate_bps, const MacOverhead& ovh) {
  if (!(phy_rate_bps > 0.0)) throw DomainError("frame_airtime: phy rate must be positive");
  const double overhead_us = ovh.preamble_and_headers_us + ovh.sifs_us + ovh.ack_time_us +
                             ovh.difs_us + 0.5 * ovh.cw_min * ovh.slot_time_us;
  return overhead_us * 1e-6 + payload_bits / phy_rate_bps;
}

/// Goodput of a link that holds the channel 100% of the time.
inline double effective_throughput(double phy_rate_bps, const MacOverhead& ovh) {
  const double payload = 8.0 * ovh.mpdu_payload_bytes * std::max(ovh.ampdu_frames, 1);
  return payload / frame_airtime(payload, phy_rate_bps, ovh) * (1.0 - ovh.per);
}

/// Airtime fraction needed to carry `rate_bps` over a link of goodput `eff_tput_bps`.
/// May exceed 1; contention resolution scales it down.
inline double required_airtime(double rate_bps, double eff_tput_bps) {
  if (!(eff_tput_bps > 0.0)) throw DomainError("required_airtime: goodput must be positive");
  return rate_bps / eff_tput_bps;
}

/// Per-(AP, band) MAC state: airtime demand of every flow mapped to the link
/// and the fraction of that demand actually served.
struct LinkState {
  int ap_id = 0;
  Band band = Band::B2G4;
  std::map<int, double> demands;
  double served_scale = 1.0;

  double total_demand() const {
    double s = 0.0;
    for (const auto& [flow, d] : demands) s += d;
    return s;
  }
  double served_airtime() const { return served_scale * total_demand(); }
};

/// Clique-proportional sharing. Within each maximal clique whose summed demand
/// exceeds 1, member i gets demand_i / sum airtime, i.e. scale 1 / sum. An AP
/// in several saturated cliques keeps the smallest scale.
inline std::vector<double> share_airtime(std::span<const double> per_ap_demand,
                                         const std::vector<ContentionGraph::VertexSet>& cliques) {
  std::vector<double> scale(per_ap_demand.size(), 1.0);
  for (ContentionGraph::VertexSet c : cliques) {
    double total = 0.0;
    for (std::size_t i = 0; i < per_ap_demand.size(); ++i)
      if ((c >> i) & 1u) total += per_ap_demand[i];
    if (total <= 1.0) continue;
    const double s = 1.0 / total;
    for (std::size_t i = 0; i < per_ap_demand.size(); ++i)
      if ((c >> i) & 1u) scale[i] = std::min(scale[i], s);
  }
  return scale;
}

inline std::vector<double> share_airtime(std::span<const double> per_ap_demand,
                                         const ContentionGraph& graph) {
  return share_airtime(per_ap_demand, graph.maximal_cliques());
}

}  // namespace mlo
