#pragma once

// Radio abstraction: indoor path loss, receive power, SNR, SNR-to-MCS rate
// selection and the per-band carrier-sense graph between APs.

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <span>
#include <string>
#include <vector>

#include "mlo/graph.hpp"
#include "mlo/types.hpp"

namespace mlo {

struct Position {
  double x = 0.0;
  double y = 0.0;
  friend bool operator==(const Position&, const Position&) = default;
};

inline double distance(Position a, Position b) noexcept { return std::hypot(a.x - b.x, a.y - b.y); }

struct BandSpec {
  Band band = Band::B2G4;
  double carrier_ghz = 2.437;
  double bandwidth_mhz = 20.0;
  int channel_id = 6;
};

/// The three interfaces every MLD carries. All APs share the channel of a band.
inline std::array<BandSpec, kNumBands> default_band_specs() {
  return {BandSpec{Band::B2G4, 2.437, 20.0, 6}, BandSpec{Band::B5G, 5.230, 40.0, 46},
          BandSpec{Band::B6G, 6.295, 80.0, 71}};
}

/// Dual-slope indoor model (11ax residential family):
///   PL(d) = L0 + 20 log10(f / 2.4 GHz) + 10 n_near log10(min(d, bp))
///           + [d > bp] 10 n_far log10(d / bp)
///           + wall_attenuation * (f / 2.4 GHz)^wall_freq_exponent * d / wall_spacing
/// The wall term is the expected wall count along the path (kept continuous)
/// times a per-wall loss that grows with carrier frequency.
struct PathLossParams {
  double l0_db = 40.05;
  double exponent_near = 2.0;
  double exponent_far = 3.5;
  double breakpoint_m = 5.0;
  double wall_attenuation_db = 5.0;
  double wall_spacing_m = 5.0;
  double wall_freq_exponent = 2.0;
  double d_min_m = 0.5;
};

struct McsRow {
  double min_snr_db = 0.0;
  int bits_per_subcarrier = 1;
  double code_rate = 0.5;
};

/// 802.11ax MCS 0-11 with commonly used minimum-SNR thresholds.
inline std::vector<McsRow> default_mcs_table() {
  return {{2.0, 1, 1.0 / 2}, {5.0, 2, 1.0 / 2}, {9.0, 2, 3.0 / 4},   {11.0, 4, 1.0 / 2},
          {15.0, 4, 3.0 / 4}, {18.0, 6, 2.0 / 3}, {20.0, 6, 3.0 / 4}, {25.0, 6, 5.0 / 6},
          {29.0, 8, 3.0 / 4}, {31.0, 8, 5.0 / 6}, {34.0, 10, 3.0 / 4}, {37.0, 10, 5.0 / 6}};
}

/// Data subcarriers of an HE PPDU for the given channel width.
inline int data_subcarriers(double bandwidth_mhz) {
  if (bandwidth_mhz == 20.0) return 234;
  if (bandwidth_mhz == 40.0) return 468;
  if (bandwidth_mhz == 80.0) return 980;
  if (bandwidth_mhz == 160.0) return 1960;
  throw DomainError("unsupported channel width " + std::to_string(bandwidth_mhz) + " MHz");
}

// 12.8 us OFDM symbol + 0.8 us guard interval
inline constexpr double kHeSymbolSeconds = 13.6e-6;

inline double mcs_row_rate(const McsRow& row, double bandwidth_mhz, int nss) {
  return data_subcarriers(bandwidth_mhz) * row.bits_per_subcarrier * row.code_rate * nss /
         kHeSymbolSeconds;
}

struct PhyModel {
  PathLossParams pathloss;
  double cca_threshold_dbm = -82.0;
  double noise_floor_dbm_hz = -174.0;
  std::vector<McsRow> mcs_table = default_mcs_table();
};

/// Rows must be strictly increasing in threshold and in rate.
inline void validate_mcs_table(std::span<const McsRow> table) {
  if (table.empty()) throw ConfigError("mcs table is empty");
  for (std::size_t i = 1; i < table.size(); ++i) {
    const double r0 = mcs_row_rate(table[i - 1], 20.0, 1);
    const double r1 = mcs_row_rate(table[i], 20.0, 1);
    if (!(table[i].min_snr_db > table[i - 1].min_snr_db) || !(r1 > r0))
      throw ConfigError("mcs table rows must be strictly increasing (row " + std::to_string(i) +
                        ")");
  }
}

/// Whitespace separated rows: `min_snr_db bits_per_subcarrier code_rate`.
/// Blank lines and lines starting with '#' are skipped.
inline std::vector<McsRow> load_mcs_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("mcs_table_path: cannot open '" + path + "'");
  std::vector<McsRow> rows;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream fields(line);
    McsRow row;
    if (!(fields >> row.min_snr_db >> row.bits_per_subcarrier >> row.code_rate) ||
        row.bits_per_subcarrier <= 0 || row.code_rate <= 0.0 || row.code_rate > 1.0)
      throw ConfigError("mcs_table_path: malformed row at line " + std::to_string(line_no));
    rows.push_back(row);
  }
  validate_mcs_table(rows);
  return rows;
}

inline double path_loss(double distance_m, const BandSpec& band, const PhyModel& model) {
  const PathLossParams& p = model.pathloss;
  if (!(distance_m >= p.d_min_m))
    throw DomainError("path_loss: distance " + std::to_string(distance_m) + " m below d_min");
  double pl = p.l0_db + 20.0 * std::log10(band.carrier_ghz / 2.4) +
              10.0 * p.exponent_near * std::log10(std::min(distance_m, p.breakpoint_m));
  if (distance_m > p.breakpoint_m)
    pl += 10.0 * p.exponent_far * std::log10(distance_m / p.breakpoint_m);
  if (p.wall_spacing_m > 0.0)
    pl += p.wall_attenuation_db * std::pow(band.carrier_ghz / 2.4, p.wall_freq_exponent) * distance_m /
          p.wall_spacing_m;
  return pl;
}

inline double rx_power(double tx_power_dbm, double distance_m, const BandSpec& band,
                       const PhyModel& model) {
  return tx_power_dbm - path_loss(distance_m, band, model);
}

inline double snr(double rx_dbm, double bandwidth_mhz, double noise_figure_db,
                  double noise_floor_dbm_hz = -174.0) {
  const double noise = noise_floor_dbm_hz + 10.0 * std::log10(bandwidth_mhz * 1e6) + noise_figure_db;
  return rx_dbm - noise;
}

/// PHY rate of the highest MCS whose threshold is met; 0 when none is.
inline double select_rate(double snr_db, const BandSpec& band, int nss, const PhyModel& model) {
  const McsRow* best = nullptr;
  for (const McsRow& row : model.mcs_table)
    if (row.min_snr_db <= snr_db) best = &row;
  return best ? mcs_row_rate(*best, band.bandwidth_mhz, nss) : 0.0;
}

/// Largest distance at which rx power still meets the CCA threshold.
/// Path loss is strictly increasing, so bisection on [d_min, 10 km] suffices.
inline double coverage_radius(double tx_power_dbm, const BandSpec& band, const PhyModel& model) {
  const double dmin = model.pathloss.d_min_m;
  if (rx_power(tx_power_dbm, dmin, band, model) < model.cca_threshold_dbm) return 0.0;
  double lo = dmin, hi = 1e4;
  if (rx_power(tx_power_dbm, hi, band, model) >= model.cca_threshold_dbm) return hi;
  for (int i = 0; i < 200 && hi - lo > 1e-12; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (rx_power(tx_power_dbm, mid, band, model) >= model.cca_threshold_dbm)
      lo = mid;
    else
      hi = mid;
  }
  return lo;
}

/// APs i and j sense each other on `band` when the received power meets CCA.
/// Co-located APs are treated as d_min apart.
inline ContentionGraph contention_graph(std::span<const Position> ap_positions,
                                        std::span<const double> ap_tx_power_dbm,
                                        const BandSpec& band, const PhyModel& model) {
  ContentionGraph g(ap_positions.size());
  for (std::size_t i = 0; i < ap_positions.size(); ++i)
    for (std::size_t j = i + 1; j < ap_positions.size(); ++j) {
      const double d = std::max(distance(ap_positions[i], ap_positions[j]), model.pathloss.d_min_m);
      const double tx = std::min(ap_tx_power_dbm[i], ap_tx_power_dbm[j]);
      if (rx_power(tx, d, band, model) >= model.cca_threshold_dbm) g.connect(i, j);
    }
  return g;
}

}  // namespace mlo
