#pragma once

// Batch runner: every policy over the same N_D paired deployments, per
// deployment CSV rows and a nearest-rank percentile summary.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "mlo/config.hpp"
#include "mlo/engine.hpp"
#include "mlo/topology.hpp"

namespace mlo {

inline constexpr std::array<double, 5> kSummaryPercentiles{5, 25, 50, 75, 95};
inline constexpr double kLossThreshold = 0.05;

/// Nearest-rank percentile: the ceil(p/100 * n)-th smallest sample (rank >= 1).
inline double percentile_nearest_rank(std::vector<double> samples, double p) {
  if (samples.empty()) throw DomainError("percentile of an empty sample");
  std::sort(samples.begin(), samples.end());
  const auto n = static_cast<double>(samples.size());
  auto rank = static_cast<std::size_t>(std::ceil(p / 100.0 * n));
  rank = std::clamp<std::size_t>(rank, 1, samples.size());
  return samples[rank - 1];
}

enum class LossClass : std::uint8_t { Video, Data, All };

inline std::string_view to_string(LossClass c) noexcept {
  switch (c) {
    case LossClass::Video: return "video";
    case LossClass::Data: return "data";
    case LossClass::All: return "all";
  }
  return "?";
}

inline constexpr std::array<LossClass, 3> kLossClasses{LossClass::Video, LossClass::Data, LossClass::All};

inline std::optional<double> class_loss(const DeploymentResult& r, LossClass c) {
  switch (c) {
    case LossClass::Video: return r.avg_loss_video;
    case LossClass::Data: return r.avg_loss_data;
    case LossClass::All: return r.avg_loss_all;
  }
  return std::nullopt;
}

inline std::size_t class_count(const DeploymentResult& r, LossClass c) {
  switch (c) {
    case LossClass::Video: return r.n_video;
    case LossClass::Data: return r.n_data;
    case LossClass::All: return r.n_video + r.n_data;
  }
  return 0;
}

/// Both classes below the threshold; an absent class does not disqualify.
inline bool meets_threshold(const DeploymentResult& r, double threshold = kLossThreshold) {
  return r.avg_loss_video.value_or(0.0) < threshold && r.avg_loss_data.value_or(0.0) < threshold;
}

struct SummaryRow {
  PolicyKind policy = PolicyKind::SLCI;
  LossClass loss_class = LossClass::Video;
  std::size_t n = 0;  // deployments where the class is present
  std::array<double, kSummaryPercentiles.size()> percentiles{};
  double frac_below_5pct = 0.0;

  double p(double q) const {
    for (std::size_t i = 0; i < kSummaryPercentiles.size(); ++i)
      if (kSummaryPercentiles[i] == q) return percentiles[i];
    throw DomainError("percentile not in the summary set");
  }
};

struct PolicyResults {
  PolicyKind policy = PolicyKind::SLCI;
  std::vector<DeploymentResult> deployments;  // indexed by deployment_index
};

/// Per policy and loss class: nearest-rank percentiles over deployments and
/// the fraction of deployments with both class losses under 5%.
inline std::vector<SummaryRow> aggregate_results(const std::vector<PolicyResults>& all) {
  std::vector<SummaryRow> out;
  for (const PolicyResults& pr : all) {
    std::size_t compliant = 0;
    for (const DeploymentResult& r : pr.deployments) compliant += meets_threshold(r) ? 1 : 0;
    const double frac = pr.deployments.empty()
                            ? 0.0
                            : static_cast<double>(compliant) / static_cast<double>(pr.deployments.size());
    for (LossClass c : kLossClasses) {
      SummaryRow row;
      row.policy = pr.policy;
      row.loss_class = c;
      row.frac_below_5pct = frac;
      std::vector<double> samples;
      for (const DeploymentResult& r : pr.deployments)
        if (auto v = class_loss(r, c)) samples.push_back(*v);
      row.n = samples.size();
      if (!samples.empty())
        for (std::size_t i = 0; i < kSummaryPercentiles.size(); ++i)
          row.percentiles[i] = percentile_nearest_rank(samples, kSummaryPercentiles[i]);
      out.push_back(row);
    }
  }
  return out;
}

inline const SummaryRow& find_row(const std::vector<SummaryRow>& rows, PolicyKind p, LossClass c) {
  for (const SummaryRow& r : rows)
    if (r.policy == p && r.loss_class == c) return r;
  throw DomainError("no summary row for policy " + std::string(to_string(p)));
}

/// Runs `fn(task)` for task in [0, n) on `workers` threads. Tasks write to
/// disjoint slots, so the result does not depend on scheduling. The first
/// exception thrown by a task is rethrown.
template <class Fn>
void parallel_for(std::size_t n, int workers, Fn&& fn) {
  const auto nthreads = std::min<std::size_t>(static_cast<std::size_t>(std::max(workers, 1)), n);
  if (nthreads <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < nthreads; ++t)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
          next = n;
        }
      }
    });
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

/// Simulates every (policy, deployment index) pair. Deployment k has the same
/// geometry and traffic under every policy; only BSS_A's policy differs.
inline std::vector<PolicyResults> simulate_batch(const SimConfig& config) {
  const auto nd = static_cast<std::size_t>(config.n_deployments);
  std::vector<PolicyResults> out(config.policies.size());
  for (std::size_t p = 0; p < out.size(); ++p) {
    out[p].policy = config.policies[p];
    out[p].deployments.resize(nd);
  }
  parallel_for(out.size() * nd, config.workers, [&](std::size_t task) {
    const std::size_t p = task / nd;
    const std::size_t k = task % nd;
    SimConfig c = config;
    c.policy_under_test = config.policies[p];
    const Deployment dep = generate_deployment(c, static_cast<int>(k));
    out[p].deployments[k] = run_deployment(dep, c);
  });
  return out;
}

// Output files

inline std::string format_loss(const std::optional<double>& v) {
  return v ? detail::format_double(*v) : std::string();
}

inline void write_deployments_csv(std::ostream& os, const std::vector<PolicyResults>& all) {
  os << "deployment_index,policy,flow_kind,avg_loss,n_flows,seed\n";
  for (const PolicyResults& pr : all)
    for (const DeploymentResult& r : pr.deployments)
      for (LossClass c : kLossClasses)
        os << r.deployment_index << ',' << to_string(pr.policy) << ',' << to_string(c) << ','
           << format_loss(class_loss(r, c)) << ',' << class_count(r, c) << ',' << r.seed << '\n';
}

inline void write_summary_csv(std::ostream& os, const std::vector<SummaryRow>& rows) {
  os << "policy,flow_kind,p5,p25,p50,p75,p95,frac_below_5pct\n";
  for (const SummaryRow& r : rows) {
    os << to_string(r.policy) << ',' << to_string(r.loss_class);
    for (double v : r.percentiles) os << ',' << (r.n ? detail::format_double(v) : std::string());
    os << ',' << detail::format_double(r.frac_below_5pct) << '\n';
  }
}

inline void write_metadata(std::ostream& os, const SimConfig& config) {
  for (const auto& [k, v] : config_echo(config)) os << k << " = " << v << '\n';
  os << "# effective_placement_radius_m = " << detail::format_double(effective_placement_radius(config)) << '\n';
  os << "# percentile_method = nearest-rank\n";
  os << "# loss_averaging = unweighted mean of per-flow loss over BSS_A flows "
        "(alternative: 1 - sum delivered / sum offered)\n";
  os << "# pairing = deployment k shares geometry and traffic seeds across policies\n";
  os << "# contention = clique-proportional airtime sharing, min scale over saturated cliques\n";
}

struct BatchOutput {
  std::vector<PolicyResults> results;
  std::vector<SummaryRow> summary;
};

/// Simulates and writes deployments.csv, metadata.txt and (optionally)
/// summary.csv into config.out_dir.
inline BatchOutput run_batch(const SimConfig& config) {
  BatchOutput out;
  out.results = simulate_batch(config);
  out.summary = aggregate_results(out.results);
  namespace fs = std::filesystem;
  fs::create_directories(config.out_dir);
  const fs::path dir(config.out_dir);
  {
    std::ofstream f(dir / "deployments.csv", std::ios::binary);
    write_deployments_csv(f, out.results);
  }
  {
    std::ofstream f(dir / "metadata.txt", std::ios::binary);
    write_metadata(f, config);
  }
  if (config.emit_summary) {
    std::ofstream f(dir / "summary.csv", std::ios::binary);
    write_summary_csv(f, out.summary);
  }
  return out;
}

}  // namespace mlo
