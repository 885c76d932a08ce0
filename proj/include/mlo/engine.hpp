#pragma once

// Discrete-event simulation of one deployment. State is piecewise constant
// between ON/OFF toggles; at every toggle the affected flows are
// (de)allocated, the airtime shares of each band are recomputed and the
// delivered bits of the elapsed interval are integrated.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "mlo/config.hpp"
#include "mlo/mac.hpp"
#include "mlo/phy.hpp"
#include "mlo/policy.hpp"
#include "mlo/topology.hpp"
#include "mlo/traffic.hpp"

namespace mlo {

struct FlowOutcome {
  int flow_id = 0;
  int bss_id = 0;
  FlowKind kind = FlowKind::Data;
  double offered_bits = 0.0;
  double delivered_bits = 0.0;
};

struct DeploymentResult {
  int deployment_index = 0;
  std::uint64_t seed = 0;
  PolicyKind policy = PolicyKind::SLCI;
  std::vector<FlowOutcome> per_flow;
  // Unweighted mean of per-flow losses over BSS_A; empty when BSS_A has no
  // flow of that kind.
  std::optional<double> avg_loss_video;
  std::optional<double> avg_loss_data;
  std::optional<double> avg_loss_all;
  // Same means over every BSS, for diagnostics.
  std::optional<double> network_loss_video;
  std::optional<double> network_loss_data;
  std::size_t n_video = 0;
  std::size_t n_data = 0;
  std::size_t events = 0;
};

inline double flow_loss(double offered_bits, double delivered_bits) {
  if (delivered_bits > offered_bits)
    throw DomainError("flow_loss: delivered bits exceed offered bits");
  if (offered_bits <= 0.0) return 0.0;
  return 1.0 - delivered_bits / offered_bits;
}

/// Toggle times given up front, one ascending list per flow id.
class ScriptedToggles {
 public:
  explicit ScriptedToggles(std::vector<std::vector<double>> times) : times_(std::move(times)) {}

  double operator()(const Flow& flow, double now) const {
    const auto& ts = times_.at(static_cast<std::size_t>(flow.flow_id));
    const auto it = std::upper_bound(ts.begin(), ts.end(), now);
    return it == ts.end() ? std::numeric_limits<double>::infinity() : *it;
  }

  double first(int flow_id) const {
    const auto& ts = times_.at(static_cast<std::size_t>(flow_id));
    return ts.empty() ? std::numeric_limits<double>::infinity() : ts.front();
  }

 private:
  std::vector<std::vector<double>> times_;
};

struct NoObserver {
  template <class View>
  void operator()(const View&) const noexcept {}
};

/// Per-deployment simulation state. APs are indexed by BSS id.
class Simulation {
 public:
  Simulation(const Deployment& dep, std::vector<Flow> flows, const SimConfig& config)
      : dep_(dep), config_(config), flows_(std::move(flows)) {
    n_aps_ = dep.n_aps();
    for (Band b : kAllBands) {
      graphs_[index_of(b)] = contention_graph(dep, b, config.phy);
      cliques_[index_of(b)] = graphs_[index_of(b)].maximal_cliques();
      demand_[index_of(b)].assign(n_aps_, 0.0);
      scale_[index_of(b)].assign(n_aps_, 1.0);
    }
    usable_.resize(flows_.size());
    goodput_.resize(flows_.size());
    pin_.resize(flows_.size());
    for (const Flow& f : flows_) {
      const auto fi = static_cast<std::size_t>(f.flow_id);
      const Node& sta = node(f.sta_id);
      const Node& ap = dep.ap_of_bss(f.bss_id);
      const double d = std::max(distance(sta.position, ap.position), config.phy.pathloss.d_min_m);
      const BandSet enabled = dep.enabled_links.at(f.sta_id);
      for (Band b : kAllBands) {
        if (!enabled.contains(b)) continue;
        const BandSpec& spec = dep.band(b);
        const double s = snr(rx_power(ap.tx_power_dbm, d, spec, config.phy), spec.bandwidth_mhz,
                             sta.noise_figure_db, config.phy.noise_floor_dbm_hz);
        const double phy_rate = select_rate(s, spec, std::min(sta.n_spatial_streams, ap.n_spatial_streams),
                                            config.phy);
        if (phy_rate <= 0.0) continue;
        goodput_[fi][index_of(b)] = effective_throughput(phy_rate, config.mac);
        usable_[fi].insert(b);
      }
      if (usable_[fi].empty())
        throw DomainError("station " + std::to_string(f.sta_id) + " has no usable link");
    }
    pin_mbsl_stations();
  }

  const std::vector<Flow>& flows() const { return flows_; }
  const Deployment& deployment() const { return dep_; }
  const SimConfig& config() const { return config_; }
  double now() const { return now_; }
  std::size_t n_aps() const { return n_aps_; }
  const ContentionGraph& graph(Band b) const { return graphs_[index_of(b)]; }
  const std::vector<ContentionGraph::VertexSet>& cliques(Band b) const { return cliques_[index_of(b)]; }
  const std::vector<double>& demand(Band b) const { return demand_[index_of(b)]; }
  const std::vector<double>& scale(Band b) const { return scale_[index_of(b)]; }
  BandSet usable_links(int flow_id) const { return usable_[static_cast<std::size_t>(flow_id)]; }
  const PerBand& goodputs(int flow_id) const { return goodput_[static_cast<std::size_t>(flow_id)]; }
  PolicyKind policy_of(int bss) const { return dep_.ap_policies.at(bss); }
  std::optional<Band> pin(int flow_id) const { return pin_[static_cast<std::size_t>(flow_id)]; }

  double served_airtime(std::size_t ap, Band b) const {
    return demand_[index_of(b)][ap] * scale_[index_of(b)][ap];
  }

  PerBand occupancies(std::size_t ap) const {
    PerBand occ{};
    for (Band b : kAllBands) {
      std::vector<double> served(n_aps_);
      for (std::size_t j = 0; j < n_aps_; ++j) served[j] = served_airtime(j, b);
      occ[index_of(b)] = occupancy(ap, served, graphs_[index_of(b)]);
    }
    return occ;
  }

  /// Snapshot of every (AP, band) link with per-flow airtime demands.
  std::vector<LinkState> link_states() const {
    std::vector<LinkState> out;
    for (std::size_t ap = 0; ap < n_aps_; ++ap)
      for (Band b : kAllBands) {
        LinkState ls;
        ls.ap_id = static_cast<int>(ap);
        ls.band = b;
        ls.served_scale = scale_[index_of(b)][ap];
        for (const Flow& f : flows_)
          if (static_cast<std::size_t>(f.bss_id) == ap && f.on() && f.allocation[index_of(b)] > 0.0)
            ls.demands[f.flow_id] = airtime_of(f, b);
        out.push_back(std::move(ls));
      }
    return out;
  }

  template <class Toggles, class Observer = NoObserver>
  DeploymentResult run(Toggles&& toggles, Observer&& observer = {}) {
    const double horizon = config_.sim_time_s;
    now_ = 0.0;
    std::vector<int> batch;
    for (const Flow& f : flows_)
      if (f.on()) batch.push_back(f.flow_id);
    allocate_batch(batch);
    reshare();
    observer(*this);

    std::size_t events = 0;
    while (true) {
      double t_next = std::numeric_limits<double>::infinity();
      for (const Flow& f : flows_) t_next = std::min(t_next, f.next_toggle_time);
      if (!(t_next <= horizon)) {
        integrate(horizon - now_);
        now_ = horizon;
        break;
      }
      integrate(t_next - now_);
      now_ = t_next;
      ++events;

      batch.clear();
      for (Flow& f : flows_) {
        if (f.next_toggle_time != t_next) continue;
        if (f.on()) {
          f.state = FlowState::OFF;
          f.allocation = {};
        } else {
          f.state = FlowState::ON;
          batch.push_back(f.flow_id);
        }
        f.next_toggle_time = toggles(f, now_);
      }
      if (!batch.empty()) reshare();
      allocate_batch(batch);
      reshare();
      observer(*this);
    }
    return collect(events);
  }

 private:
  const Node& node(int node_id) const { return dep_.nodes.at(static_cast<std::size_t>(node_id)); }

  double airtime_of(const Flow& f, Band b) const {
    const double x = f.allocation[index_of(b)];
    if (x <= 0.0) return 0.0;
    return required_airtime(x * f.rate_bps, goodput_[static_cast<std::size_t>(f.flow_id)][index_of(b)]);
  }

  void reshare() {
    for (Band b : kAllBands) {
      auto& d = demand_[index_of(b)];
      std::fill(d.begin(), d.end(), 0.0);
    }
    for (const Flow& f : flows_) {
      if (!f.on()) continue;
      for (Band b : kAllBands) demand_[index_of(b)][static_cast<std::size_t>(f.bss_id)] += airtime_of(f, b);
    }
    for (Band b : kAllBands) scale_[index_of(b)] = share_airtime(demand_[index_of(b)], cliques_[index_of(b)]);
  }

  // Flows turning ON at the same instant are decided in ascending flow id;
  // each decision sees the link state left by the previous one.
  void allocate_batch(const std::vector<int>& ids) {
    for (std::size_t k = 0; k < ids.size(); ++k) {
      Flow& f = flows_[static_cast<std::size_t>(ids[k])];
      const auto fi = static_cast<std::size_t>(f.flow_id);
      if (k > 0) reshare();
      AllocationRequest req;
      req.policy = policy_of(f.bss_id);
      req.kind = f.kind;
      req.rate_bps = f.rate_bps;
      req.enabled = usable_[fi];
      req.occupancies = occupancies(static_cast<std::size_t>(f.bss_id));
      req.goodputs_bps = goodput_[fi];
      req.sl_band = config_.sl_band;
      req.pin = pin_[fi];
      f.allocation = allocate(req);
    }
  }

  // MBSL stations pick their band once, in station order, by the airtime
  // their BSS has already committed to each band at full rate.
  void pin_mbsl_stations() {
    std::vector<PerBand> committed(n_aps_, PerBand{});
    for (const Flow& f : flows_) {
      if (policy_of(f.bss_id) != PolicyKind::MBSL) continue;
      const auto fi = static_cast<std::size_t>(f.flow_id);
      PerBand& load = committed[static_cast<std::size_t>(f.bss_id)];
      const Band b = least_occupied(usable_[fi], load);
      pin_[fi] = b;
      load[index_of(b)] += required_airtime(f.rate_bps, goodput_[fi][index_of(b)]);
    }
  }

  void integrate(double dt) {
    if (dt <= 0.0) return;
    for (Flow& f : flows_) {
      if (!f.on()) continue;
      const double offered = f.rate_bps * dt;
      double delivered = 0.0;
      for (Band b : kAllBands)
        delivered += f.allocation[index_of(b)] * f.rate_bps * scale_[index_of(b)][static_cast<std::size_t>(f.bss_id)] * dt;
      f.offered_bits += offered;
      f.delivered_bits += std::min(delivered, offered);
    }
  }

  DeploymentResult collect(std::size_t events) const {
    DeploymentResult r;
    r.deployment_index = dep_.deployment_index;
    r.seed = dep_.seed;
    r.policy = policy_of(kCentralBss);
    r.events = events;
    double sum_v = 0, sum_d = 0, net_v = 0, net_d = 0;
    std::size_t nv = 0, nd = 0, net_nv = 0, net_nd = 0;
    for (const Flow& f : flows_) {
      r.per_flow.push_back({f.flow_id, f.bss_id, f.kind, f.offered_bits, f.delivered_bits});
      const double loss = flow_loss(f.offered_bits, f.delivered_bits);
      const bool video = f.kind == FlowKind::Video;
      (video ? net_v : net_d) += loss;
      ++(video ? net_nv : net_nd);
      if (f.bss_id != kCentralBss) continue;
      (video ? sum_v : sum_d) += loss;
      ++(video ? nv : nd);
    }
    r.n_video = nv;
    r.n_data = nd;
    if (nv) r.avg_loss_video = sum_v / static_cast<double>(nv);
    if (nd) r.avg_loss_data = sum_d / static_cast<double>(nd);
    if (nv + nd) r.avg_loss_all = (sum_v + sum_d) / static_cast<double>(nv + nd);
    if (net_nv) r.network_loss_video = net_v / static_cast<double>(net_nv);
    if (net_nd) r.network_loss_data = net_d / static_cast<double>(net_nd);
    return r;
  }

  const Deployment& dep_;
  const SimConfig& config_;
  std::vector<Flow> flows_;
  std::size_t n_aps_ = 0;
  double now_ = 0.0;
  std::array<ContentionGraph, kNumBands> graphs_;
  std::array<std::vector<ContentionGraph::VertexSet>, kNumBands> cliques_;
  std::array<std::vector<double>, kNumBands> demand_;
  std::array<std::vector<double>, kNumBands> scale_;
  std::vector<BandSet> usable_;
  std::vector<PerBand> goodput_;
  std::vector<std::optional<Band>> pin_;
};

template <class Toggles, class Observer = NoObserver>
DeploymentResult run_deployment(const Deployment& dep, std::vector<Flow> flows, const SimConfig& config,
                                Toggles&& toggles, Observer&& observer = {}) {
  Simulation sim(dep, std::move(flows), config);
  return sim.run(std::forward<Toggles>(toggles), std::forward<Observer>(observer));
}

/// Flows and toggle times drawn from the deployment's own seeded streams.
template <class Observer = NoObserver>
DeploymentResult run_deployment(const Deployment& dep, const SimConfig& config, Observer&& observer = {}) {
  const auto index = static_cast<std::uint64_t>(dep.deployment_index);
  ExponentialToggles toggles(config.t_on_s, config.t_off_s,
                             make_rng(config.base_seed, index, Stream::Toggles));
  return run_deployment(dep, spawn_flows(dep, config), config, toggles,
                        std::forward<Observer>(observer));
}

}  // namespace mlo
