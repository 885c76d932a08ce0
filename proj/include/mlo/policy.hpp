#pragma once

// Upper-MAC traffic manager: maps a flow's rate onto the station's enabled
// links. Every allocator returns fractions in [0,1] that sum to 1 over
// `enabled`; ties are always broken in band order 2.4 < 5 < 6.

#include <algorithm>
#include <array>
#include <optional>
#include <span>
#include <vector>

#include "mlo/graph.hpp"
#include "mlo/traffic.hpp"
#include "mlo/types.hpp"

namespace mlo {

using PerBand = std::array<double, kNumBands>;

/// Channel occupancy seen by `ap` on one band: its own served airtime plus
/// the served airtime of every AP it senses, clamped to [0,1].
inline double occupancy(std::size_t ap, std::span<const double> served_airtime,
                        const ContentionGraph& graph) {
  double busy = served_airtime[ap];
  for (std::size_t j = 0; j < served_airtime.size(); ++j)
    if (graph.adjacent(ap, j)) busy += served_airtime[j];
  return std::clamp(busy, 0.0, 1.0);
}

inline Allocation single_link(Band b) {
  Allocation a{};
  a[index_of(b)] = 1.0;
  return a;
}

inline Allocation allocate_mlsa(BandSet enabled) {
  Allocation a{};
  const double share = 1.0 / static_cast<double>(enabled.size());
  for (Band b : kAllBands)
    if (enabled.contains(b)) a[index_of(b)] = share;
  return a;
}

/// Least occupied band of `candidates`; first in band order on ties.
inline Band least_occupied(BandSet candidates, const PerBand& occupancies) {
  std::optional<Band> best;
  for (Band b : kAllBands)
    if (candidates.contains(b) && (!best || occupancies[index_of(b)] < occupancies[index_of(*best)]))
      best = b;
  return *best;
}

inline Allocation allocate_slci(BandSet enabled, const PerBand& occupancies) {
  return single_link(least_occupied(enabled, occupancies));
}

/// No enabled link has any free airtime left.
inline bool mcaa_infeasible(BandSet enabled, const PerBand& occupancies) {
  double free = 0.0;
  for (Band b : kAllBands)
    if (enabled.contains(b)) free += std::max(0.0, 1.0 - occupancies[index_of(b)]);
  return free <= 0.0;
}

/// Water-filling split. Putting fraction x_l of the rate on link l adds
/// x_l * rate / goodput_l of airtime; the split raises the least occupied
/// links to a common level and leaves links above that level untouched.
/// With every link full the level rule degenerates to a goodput-proportional
/// split, which is the declared fallback for an infeasible flow.
inline Allocation allocate_mcaa(double rate_bps, BandSet enabled, const PerBand& occupancies,
                                const PerBand& goodputs_bps) {
  struct Link {
    Band band;
    double occ;
    double weight;  // goodput / rate: fraction of the rate carried per unit airtime
  };
  std::vector<Link> links;
  for (Band b : kAllBands)
    if (enabled.contains(b))
      links.push_back({b, occupancies[index_of(b)], goodputs_bps[index_of(b)] / rate_bps});
  std::stable_sort(links.begin(), links.end(),
                   [](const Link& l, const Link& r) { return l.occ < r.occ; });

  // Fill the k least occupied links to `level`: sum_l (level - occ_l) * weight_l = 1.
  double level = 0.0;
  std::size_t active = 0;
  double sum_w = 0.0, sum_wocc = 0.0;
  for (std::size_t k = 0; k < links.size(); ++k) {
    sum_w += links[k].weight;
    sum_wocc += links[k].weight * links[k].occ;
    level = (1.0 + sum_wocc) / sum_w;
    active = k + 1;
    if (k + 1 == links.size() || level <= links[k + 1].occ) break;
  }

  Allocation a{};
  double total = 0.0;
  for (std::size_t k = 0; k < active; ++k) {
    const double x = std::max(0.0, (level - links[k].occ) * links[k].weight);
    a[index_of(links[k].band)] = x;
    total += x;
  }
  for (double& x : a) x /= total;
  return a;
}

/// Video on 6 GHz whenever it is enabled (least occupied link otherwise);
/// data on the emptier of 2.4/5 GHz, or on the least occupied link if
/// neither is enabled.
inline Allocation allocate_vds(FlowKind kind, BandSet enabled, const PerBand& occupancies) {
  if (kind == FlowKind::Video) {
    if (enabled.contains(Band::B6G)) return single_link(Band::B6G);
    return allocate_slci(enabled, occupancies);
  }
  BandSet low;
  for (Band b : {Band::B2G4, Band::B5G})
    if (enabled.contains(b)) low.insert(b);
  return allocate_slci(low.empty() ? enabled : low, occupancies);
}

/// SL: every flow of the BSS on `sl_band`, 2.4 GHz when the station lacks it.
inline Band sl_link(BandSet enabled, Band sl_band) {
  if (enabled.contains(sl_band)) return sl_band;
  if (enabled.contains(Band::B2G4)) return Band::B2G4;
  return least_occupied(enabled, PerBand{});
}

/// Legacy baselines. MBSL uses the band pinned at association when given,
/// otherwise the least occupied enabled band (the association-time choice).
inline Allocation allocate_legacy(PolicyKind kind, BandSet enabled, const PerBand& occupancies,
                                  Band sl_band = Band::B5G, std::optional<Band> pin = std::nullopt) {
  if (kind == PolicyKind::SL) return single_link(sl_link(enabled, sl_band));
  if (pin && enabled.contains(*pin)) return single_link(*pin);
  return single_link(least_occupied(enabled, occupancies));
}

/// Inputs of one allocation decision, taken from the link state snapshot
/// just before the flow turns ON.
struct AllocationRequest {
  PolicyKind policy = PolicyKind::SLCI;
  FlowKind kind = FlowKind::Data;
  double rate_bps = 0.0;
  BandSet enabled;
  PerBand occupancies{};
  PerBand goodputs_bps{};
  Band sl_band = Band::B5G;
  std::optional<Band> pin;
};

inline Allocation allocate(const AllocationRequest& r) {
  switch (r.policy) {
    case PolicyKind::MLSA: return allocate_mlsa(r.enabled);
    case PolicyKind::SLCI: return allocate_slci(r.enabled, r.occupancies);
    case PolicyKind::MCAA: return allocate_mcaa(r.rate_bps, r.enabled, r.occupancies, r.goodputs_bps);
    case PolicyKind::VDS: return allocate_vds(r.kind, r.enabled, r.occupancies);
    case PolicyKind::SL:
    case PolicyKind::MBSL: return allocate_legacy(r.policy, r.enabled, r.occupancies, r.sl_band, r.pin);
  }
  return allocate_mlsa(r.enabled);
}

inline bool is_single_link_policy(PolicyKind p) noexcept {
  return p == PolicyKind::SLCI || p == PolicyKind::VDS || p == PolicyKind::SL || p == PolicyKind::MBSL;
}

}  // namespace mlo
