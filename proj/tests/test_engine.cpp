#include <gtest/gtest.h>

#include <limits>

#include "micro_scenarios.hpp"
#include "mlo/engine.hpp"
#include "invariants.hpp"
#include "oracle.hpp"

namespace {

using namespace mlo;
using namespace mlo::testing;

class MicroCatalogue : public ::testing::TestWithParam<std::size_t> {};

TEST_P(MicroCatalogue, MatchesIntervalOracle) {
  const MicroScenario s = micro_catalogue().at(GetParam());
  const DeploymentResult r = run_micro(s);
  const auto expected = IntervalOracle(s).run();
  ASSERT_EQ(r.per_flow.size(), expected.size());
  for (std::size_t i = 0; i < expected.size(); ++i) {
    const FlowOutcome& f = r.per_flow[i];
    EXPECT_TRUE(close_rel(f.offered_bits, expected[i].offered)) << s.name << " flow " << i;
    EXPECT_TRUE(close_rel(f.delivered_bits, expected[i].delivered)) << s.name << " flow " << i;
    EXPECT_TRUE(close_rel(flow_loss(f.offered_bits, f.delivered_bits), expected[i].loss()))
        << s.name << " flow " << i << ": " << flow_loss(f.offered_bits, f.delivered_bits) << " vs "
        << expected[i].loss();
  }
}

INSTANTIATE_TEST_SUITE_P(All, MicroCatalogue, ::testing::Range<std::size_t>(0, micro_catalogue().size()));

TEST(MicroCatalogue, GeometryAssumptions) {
  // near_ap senses AP 0 on every band, mid_ap on 2.4 GHz only, far_ap on none
  const SimConfig c = micro_config();
  auto sensed = [&](Position other) {
    const std::vector<Position> aps{{10, 10}, other};
    const std::vector<double> tx(2, c.ap_tx_power_dbm);
    BandSet s;
    for (const BandSpec& b : c.bands)
      if (contention_graph(aps, tx, b, c.phy).adjacent(0, 1)) s.insert(b.band);
    return s;
  };
  EXPECT_EQ(sensed({13, 10}), (BandSet{Band::B2G4, Band::B5G, Band::B6G}));
  EXPECT_EQ(sensed({18, 10}), BandSet{Band::B2G4});
  EXPECT_EQ(sensed({40, 10}), BandSet{});
  EXPECT_GE(micro_catalogue().size(), 20u);
}

MicroScenario one_flow(PolicyKind p, double rate_mbps, bool on, std::vector<double> toggles = {}) {
  MicroScenario s;
  s.aps = {{10, 10}};
  s.policies = {p};
  s.flows = {{0, {11, 10}, FlowKind::Video, rate_mbps, on, std::move(toggles)}};
  s.config = micro_config();
  s.config.n_bss = 1;
  return s;
}

TEST(Engine, AllOffMeansNoLoss) {
  MicroScenario s = one_flow(PolicyKind::SLCI, 100, false);
  s.flows.push_back({0, {10, 12}, FlowKind::Data, 50, false, {}});
  const DeploymentResult r = run_micro(s);
  for (const auto& f : r.per_flow) {
    EXPECT_EQ(f.offered_bits, 0.0);
    EXPECT_EQ(f.delivered_bits, 0.0);
  }
  EXPECT_EQ(*r.avg_loss_video, 0.0);
  EXPECT_EQ(*r.avg_loss_data, 0.0);
}

TEST(Engine, TwiceGoodputLosesHalf) {
  MicroScenario s = one_flow(PolicyKind::SL, 1, true);
  const Deployment dep = build_deployment(s);
  const double g = Simulation(dep, build_flows(s), s.config).goodputs(0)[index_of(Band::B5G)];
  s.flows[0].rate_mbps = 2.0 * g / 1e6;
  EXPECT_NEAR(*run_micro(s).avg_loss_video, 0.5, 1e-9);
}

TEST(Engine, LightFlowIsLossless) {
  EXPECT_NEAR(*run_micro(one_flow(PolicyKind::MCAA, 10, true, {2, 3, 7})).avg_loss_video, 0.0, 1e-12);
}

TEST(Engine, MbslPinsSpreadAcrossBands) {
  MicroScenario s;
  s.aps = {{10, 10}};
  s.policies = {PolicyKind::MBSL};
  s.config = micro_config();
  s.config.n_bss = 1;
  for (int i = 0; i < 3; ++i) s.flows.push_back({0, {11, 10}, FlowKind::Data, 20, true, {}});
  const Deployment dep = build_deployment(s);
  const Simulation sim(dep, build_flows(s), s.config);
  EXPECT_EQ(sim.pin(0), Band::B2G4);
  EXPECT_EQ(sim.pin(1), Band::B5G);
  EXPECT_EQ(sim.pin(2), Band::B6G);
}

TEST(Engine, SimultaneousArrivalsSeeEarlierDecisions) {
  MicroScenario s = one_flow(PolicyKind::SLCI, 40, false, {1.0});
  s.flows.push_back({0, {11, 10}, FlowKind::Video, 40, false, {1.0}});
  const Deployment dep = build_deployment(s);
  Simulation sim(dep, build_flows(s), s.config);
  sim.run(build_toggles(s));
  EXPECT_EQ(sim.flows()[0].allocation, single_link(Band::B2G4));
  EXPECT_EQ(sim.flows()[1].allocation, single_link(Band::B5G));
}

TEST(Engine, ToggleBeyondHorizonIgnored) {
  const MicroScenario s = one_flow(PolicyKind::SLCI, 10, true, {12.0});
  const DeploymentResult r = run_micro(s);
  EXPECT_DOUBLE_EQ(r.per_flow[0].offered_bits, 10e6 * s.config.sim_time_s);
  EXPECT_EQ(r.events, 0u);
}

TEST(Engine, FlowLossDomain) {
  EXPECT_EQ(flow_loss(0.0, 0.0), 0.0);
  EXPECT_DOUBLE_EQ(flow_loss(4.0, 3.0), 0.25);
  EXPECT_THROW(flow_loss(1.0, 2.0), DomainError);
}

TEST(Engine, ScriptedToggles) {
  const ScriptedToggles t({{1.0, 2.5}, {}});
  Flow f;
  f.flow_id = 0;
  EXPECT_EQ(t(f, 0.0), 1.0);
  EXPECT_EQ(t(f, 1.0), 2.5);
  EXPECT_EQ(t(f, 2.5), std::numeric_limits<double>::infinity());
  EXPECT_EQ(t.first(1), std::numeric_limits<double>::infinity());
}

TEST(Engine, InvariantsOnRandomDeployments) {
  SimConfig c;
  c.sim_time_s = 30;
  c.stations_per_bss = 12;
  c.video_rate_mbps = 25;
  for (PolicyKind p : c.policies) {
    c.policy_under_test = p;
    for (int k = 0; k < 10; ++k) {
      InvariantObserver obs;
      run_deployment(generate_deployment(c, k), c, obs);
      EXPECT_EQ(obs.violations, 0) << to_string(p) << " deployment " << k;
      EXPECT_GT(obs.passes, 1);
    }
  }
}

TEST(Engine, DeterministicPerDeployment) {
  const SimConfig c;
  const Deployment d = generate_deployment(c, 9);
  const DeploymentResult a = run_deployment(d, c), b = run_deployment(d, c);
  ASSERT_EQ(a.per_flow.size(), b.per_flow.size());
  for (std::size_t i = 0; i < a.per_flow.size(); ++i)
    EXPECT_EQ(a.per_flow[i].delivered_bits, b.per_flow[i].delivered_bits);
}

}  // namespace
