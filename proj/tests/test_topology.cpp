#include <gtest/gtest.h>

#include <array>
#include <cmath>

#include "mlo/config.hpp"
#include "mlo/topology.hpp"

namespace {

using namespace mlo;

SimConfig small_config() {
  SimConfig c;
  c.stations_per_bss = 6;
  return c;
}

TEST(Deployment, Layout) {
  const SimConfig c = small_config();
  const Deployment d = generate_deployment(c, 3);
  ASSERT_EQ(d.nodes.size(), static_cast<std::size_t>(c.n_bss * (1 + c.stations_per_bss)));
  EXPECT_EQ(d.n_aps(), static_cast<std::size_t>(c.n_bss));
  EXPECT_EQ(d.nodes[0].position, (Position{10.0, 10.0}));
  for (int bss = 0; bss < c.n_bss; ++bss) {
    const Node& ap = d.ap_of_bss(bss);
    EXPECT_EQ(ap.role, Role::AP);
    EXPECT_EQ(ap.node_id, bss);
    EXPECT_GE(ap.position.x, 0.0);
    EXPECT_LE(ap.position.x, c.area_side_m);
    EXPECT_GE(ap.position.y, 0.0);
    EXPECT_LE(ap.position.y, c.area_side_m);
  }
  for (std::size_t i = 0; i < d.nodes.size(); ++i) EXPECT_EQ(d.nodes[i].node_id, static_cast<int>(i));
  EXPECT_EQ(d.ap_policies.at(kCentralBss), c.policy_under_test);
  for (int bss = 1; bss < c.n_bss; ++bss) {
    const PolicyKind p = d.ap_policies.at(bss);
    EXPECT_TRUE(p == PolicyKind::SLCI || p == PolicyKind::MCAA);
  }
}

TEST(Deployment, StationsHearTheirApOn24) {
  const SimConfig c;
  const double radius = effective_placement_radius(c);
  for (int k = 0; k < 50; ++k) {
    const Deployment d = generate_deployment(c, k);
    for (const Node& n : d.nodes) {
      if (n.role != Role::STA) continue;
      const double dist = distance(n.position, d.ap_of_bss(n.bss_id).position);
      EXPECT_GE(dist, c.phy.pathloss.d_min_m);
      EXPECT_LE(dist, radius + 1e-9);
      EXPECT_TRUE(d.enabled_links.at(n.node_id).contains(Band::B2G4));
    }
  }
}

TEST(Deployment, SameIndexSameGeometryAcrossPolicies) {
  SimConfig a = small_config(), b = small_config();
  a.policy_under_test = PolicyKind::SLCI;
  b.policy_under_test = PolicyKind::VDS;
  const Deployment da = generate_deployment(a, 7), db = generate_deployment(b, 7);
  ASSERT_EQ(da.nodes.size(), db.nodes.size());
  for (std::size_t i = 0; i < da.nodes.size(); ++i) EXPECT_EQ(da.nodes[i].position, db.nodes[i].position);
  EXPECT_EQ(da.enabled_links, db.enabled_links);
  for (int bss = 1; bss < a.n_bss; ++bss) EXPECT_EQ(da.ap_policies.at(bss), db.ap_policies.at(bss));
  EXPECT_EQ(da.ap_policies.at(0), PolicyKind::SLCI);
  EXPECT_EQ(db.ap_policies.at(0), PolicyKind::VDS);
}

TEST(Deployment, SeedsDiffer) {
  const SimConfig c = small_config();
  EXPECT_NE(generate_deployment(c, 0).nodes[1].position, generate_deployment(c, 1).nodes[1].position);
  SimConfig other = c;
  other.base_seed = 2;
  EXPECT_NE(generate_deployment(c, 0).nodes[1].position, generate_deployment(other, 0).nodes[1].position);
}

TEST(Deployment, NonCentralApsUniform) {
  // chi-square over a 4x4 grid, 15 dof; 99.9% critical value 37.70
  SimConfig c = small_config();
  c.stations_per_bss = 1;
  std::array<int, 16> bins{};
  int n = 0;
  for (int k = 0; k < 2000; ++k) {
    const Deployment d = generate_deployment(c, k);
    for (int bss = 1; bss < c.n_bss; ++bss) {
      const Position p = d.ap_of_bss(bss).position;
      const int ix = std::min(3, static_cast<int>(p.x / 5.0));
      const int iy = std::min(3, static_cast<int>(p.y / 5.0));
      ++bins[static_cast<std::size_t>(ix * 4 + iy)];
      ++n;
    }
  }
  const double expected = n / 16.0;
  double chi2 = 0.0;
  for (int b : bins) chi2 += (b - expected) * (b - expected) / expected;
  EXPECT_LT(chi2, 37.70);
}

TEST(Deployment, NeighbourPolicyFractionIsHalf) {
  SimConfig c = small_config();
  c.stations_per_bss = 1;
  int slci = 0, total = 0;
  for (int k = 0; k < 1000; ++k) {
    const Deployment d = generate_deployment(c, k);
    for (int bss = 1; bss < c.n_bss; ++bss) {
      slci += d.ap_policies.at(bss) == PolicyKind::SLCI;
      ++total;
    }
  }
  EXPECT_NEAR(static_cast<double>(slci) / total, 0.5, 0.05);
}

// Independent inversion of the path-loss model: largest d with
// tx - PL(d) >= cca, by bisection on a separately written formula.
double reference_radius(const SimConfig& c, const BandSpec& b) {
  const auto& p = c.phy.pathloss;
  auto pl = [&](double d) {
    const double fr = b.carrier_ghz / 2.4;
    double v = p.l0_db + 20 * std::log10(fr) + 10 * p.exponent_near * std::log10(std::min(d, p.breakpoint_m));
    if (d > p.breakpoint_m) v += 10 * p.exponent_far * std::log10(d / p.breakpoint_m);
    return v + p.wall_attenuation_db * std::pow(fr, p.wall_freq_exponent) * d / p.wall_spacing_m;
  };
  double lo = p.d_min_m, hi = 1000.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (c.ap_tx_power_dbm - pl(mid) >= c.phy.cca_threshold_dbm ? lo : hi) = mid;
  }
  return lo;
}

TEST(EnabledLinks, BoundaryMatchesInversion) {
  const SimConfig c;
  const Node ap = make_ap(c, 0, {0, 0});
  for (const BandSpec& b : c.bands) {
    const double r = reference_radius(c, b);
    Node sta{1, Role::STA, 0, {r * (1 - 1e-9), 0}, 15, 7, 2};
    EXPECT_TRUE(compute_enabled_links(sta, ap, c.bands, c.phy).contains(b.band)) << to_string(b.band);
    sta.position = {0, r * (1 + 1e-9)};
    EXPECT_FALSE(compute_enabled_links(sta, ap, c.bands, c.phy).contains(b.band)) << to_string(b.band);
  }
}

TEST(EnabledLinks, NestedByFrequency) {
  const SimConfig c;
  const Node ap = make_ap(c, 0, {0, 0});
  for (double d = 0.5; d < 30; d += 0.1) {
    const Node sta{1, Role::STA, 0, {d, 0}, 15, 7, 2};
    const BandSet s = compute_enabled_links(sta, ap, c.bands, c.phy);
    if (s.contains(Band::B6G)) { EXPECT_TRUE(s.contains(Band::B5G)); }
    if (s.contains(Band::B5G)) { EXPECT_TRUE(s.contains(Band::B2G4)); }
  }
}

TEST(Placement, ImpossibleRadiusThrows) {
  SimConfig c;
  c.placement_radius_m = 0.4;  // every draw lands below d_min
  const Node ap = make_ap(c, 0, {0, 0});
  Rng rng(1);
  EXPECT_THROW(place_stations(ap, 1, c, rng, 1), PlacementError);
}

TEST(Placement, AutoRadiusIs24Coverage) {
  SimConfig c;
  c.placement_radius_m = 0.0;
  EXPECT_NEAR(effective_placement_radius(c), reference_radius(c, c.band(Band::B2G4)), 1e-9);
}

TEST(Serialize, JsonShape) {
  const SimConfig c = small_config();
  const Deployment d = generate_deployment(c, 2);
  const auto j = to_json(d);
  EXPECT_EQ(j["deployment_index"], 2);
  EXPECT_EQ(j["nodes"].size(), d.nodes.size());
  EXPECT_EQ(j["band_specs"].size(), 3u);
  EXPECT_EQ(serialize(d), serialize(generate_deployment(c, 2)));
  EXPECT_EQ(nlohmann::ordered_json::parse(serialize(d)), j);
}

}  // namespace
