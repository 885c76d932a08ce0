// Batch runner for the multi-link traffic allocation simulator.
//
//   mlo_sim --policy slci,mcaa,sl --deployments 100 --out results/
//   mlo_sim --config run.cfg --set wall_attenuation_db=7 --workers 4
//   mlo_sim --dump-deployment 7

#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "mlo/batch.hpp"
#include "mlo/config.hpp"
#include "mlo/topology.hpp"

namespace {

std::string fixed(double v) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(4) << v;
  return os.str();
}

void print_summary(const std::vector<mlo::SummaryRow>& rows) {
  std::cout << "policy  class    p5      p25     p50     p75     p95     <5%\n";
  for (const auto& r : rows) {
    std::cout << std::left << std::setw(8) << mlo::to_string(r.policy) << std::setw(7)
              << mlo::to_string(r.loss_class);
    for (double v : r.percentiles) std::cout << ' ' << (r.n ? fixed(v) : std::string("   -  "));
    std::cout << ' ' << fixed(r.frac_below_5pct) << '\n';
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Flow-level simulator of 802.11be multi-link traffic allocation policies"};

  std::optional<std::string> config_path;
  std::optional<std::string> policies, out_dir;
  std::optional<int> deployments, stations, workers, dump_index;
  std::optional<std::uint64_t> seed;
  std::optional<double> video_rate, data_rate;
  std::vector<std::string> sets;
  bool emit_summary = false;
  bool quiet = false;

  app.add_option("--config", config_path, "key = value config file")->check(CLI::ExistingFile);
  app.add_option("--policy", policies, "comma separated list of mlsa|slci|mcaa|vds|sl|mbsl");
  app.add_option("--deployments", deployments, "number of random deployments (N_D)");
  app.add_option("--seed", seed, "base seed");
  app.add_option("--stations-per-bss", stations, "stations per BSS (M)");
  app.add_option("--video-rate", video_rate, "video flow rate in Mb/s");
  app.add_option("--data-rate", data_rate, "data flow rate in Mb/s");
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--workers", workers, "worker threads");
  app.add_flag("--emit-summary", emit_summary, "write summary.csv and print it");
  app.add_option("--set", sets, "override any config key: --set key=value (repeatable)");
  app.add_option("--dump-deployment", dump_index, "print deployment N as JSON and exit");
  app.add_flag("-q,--quiet", quiet, "do not print the summary table");

  CLI11_PARSE(app, argc, argv);

  try {
    std::vector<std::pair<std::string, std::string>> overrides;
    for (const std::string& s : sets) {
      const auto eq = s.find('=');
      if (eq == std::string::npos) throw mlo::ConfigError("--set expects key=value, got '" + s + "'");
      overrides.emplace_back(s.substr(0, eq), s.substr(eq + 1));
    }
    // dedicated flags take precedence over --set and the file
    if (policies) overrides.emplace_back("policies", *policies);
    if (deployments) overrides.emplace_back("n_deployments", std::to_string(*deployments));
    if (seed) overrides.emplace_back("base_seed", std::to_string(*seed));
    if (stations) overrides.emplace_back("stations_per_bss", std::to_string(*stations));
    if (video_rate) overrides.emplace_back("video_rate_mbps", mlo::detail::format_double(*video_rate));
    if (data_rate) overrides.emplace_back("data_rate_mbps", mlo::detail::format_double(*data_rate));
    if (out_dir) overrides.emplace_back("out_dir", *out_dir);
    if (workers) overrides.emplace_back("workers", std::to_string(*workers));
    if (emit_summary) overrides.emplace_back("emit_summary", "true");

    const mlo::SimConfig config = mlo::parse_config(config_path, overrides);

    if (dump_index) {
      std::cout << mlo::serialize(mlo::generate_deployment(config, *dump_index)) << '\n';
      return 0;
    }

    const mlo::BatchOutput out = mlo::run_batch(config);
    if (!quiet) print_summary(out.summary);
  } catch (const std::exception& e) {
    std::cerr << "mlo_sim: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
