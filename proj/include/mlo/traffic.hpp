#pragma once

// Downlink flows: one per station, video or data, alternating exponential
// ON and OFF periods for the whole run.

#include <array>
#include <random>
#include <vector>

#include "mlo/config.hpp"
#include "mlo/rng.hpp"
#include "mlo/topology.hpp"
#include "mlo/types.hpp"

namespace mlo {

using Allocation = std::array<double, kNumBands>;

enum class FlowState : std::uint8_t { OFF, ON };

struct Flow {
  int flow_id = 0;
  int sta_id = 0;
  int bss_id = 0;
  FlowKind kind = FlowKind::Data;
  double rate_bps = 0.0;
  FlowState state = FlowState::OFF;
  double next_toggle_time = 0.0;
  Allocation allocation{};
  double offered_bits = 0.0;
  double delivered_bits = 0.0;

  bool on() const noexcept { return state == FlowState::ON; }
};

/// Exponential holding times: mean T_ON while ON, T_OFF while OFF.
class ExponentialToggles {
 public:
  ExponentialToggles(double t_on_s, double t_off_s, Rng rng)
      : on_(1.0 / t_on_s), off_(1.0 / t_off_s), rng_(std::move(rng)) {}

  double operator()(const Flow& flow, double now) {
    return now + (flow.on() ? on_(rng_) : off_(rng_));
  }

 private:
  std::exponential_distribution<double> on_;
  std::exponential_distribution<double> off_;
  Rng rng_;
};

/// Time at which `flow` leaves its current state, given it is in it at `now`.
inline double next_toggle(const Flow& flow, double now, double t_on_s, double t_off_s, Rng& rng) {
  std::exponential_distribution<double> hold(1.0 / (flow.on() ? t_on_s : t_off_s));
  return now + hold(rng);
}

inline double offered_bits(const Flow& flow, double interval_s) {
  return flow.on() ? flow.rate_bps * interval_s : 0.0;
}

/// One flow per station in node order. Initial state is drawn from the
/// stationary distribution of the ON/OFF chain; by memorylessness the residual
/// holding time is a fresh exponential.
inline std::vector<Flow> spawn_flows(const Deployment& dep, const SimConfig& config, Rng& rng) {
  std::bernoulli_distribution video(config.video_ratio);
  std::bernoulli_distribution starts_on(config.t_on_s / (config.t_on_s + config.t_off_s));
  std::vector<Flow> flows;
  for (const Node& n : dep.nodes) {
    if (n.role != Role::STA) continue;
    Flow f;
    f.flow_id = static_cast<int>(flows.size());
    f.sta_id = n.node_id;
    f.bss_id = n.bss_id;
    f.kind = video(rng) ? FlowKind::Video : FlowKind::Data;
    f.rate_bps = 1e6 * (f.kind == FlowKind::Video ? config.video_rate_mbps : config.data_rate_mbps);
    f.state = starts_on(rng) ? FlowState::ON : FlowState::OFF;
    f.next_toggle_time = next_toggle(f, 0.0, config.t_on_s, config.t_off_s, rng);
    flows.push_back(f);
  }
  return flows;
}

inline std::vector<Flow> spawn_flows(const Deployment& dep, const SimConfig& config) {
  Rng rng = make_rng(config.base_seed, static_cast<std::uint64_t>(dep.deployment_index), Stream::Traffic);
  return spawn_flows(dep, config, rng);
}

}  // namespace mlo
