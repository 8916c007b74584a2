#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <ostream>
#include <string>
#include <vector>

#include "sgcs/density_evolution.hpp"
#include "sgcs/harness.hpp"

namespace {

struct CliExperiment {
  std::string mode = "noiseless";
  std::size_t n = 10000;
  std::size_t k = 100;
  std::string ensemble = "regular";
  std::size_t d = 3;
  std::size_t max_degree = 100;
  double eta = 1.5;
  double eps = -1.0;  // >= 0 replaces eta with 1 + eps for irregular runs
  std::size_t p = 0;
  std::size_t clusters = 0;
  std::size_t per_cluster = 0;
  double snr = 20.0;
  double gamma = 0.2;
  double a_min = 1.0;
  double rho_step = 1.0;
  std::size_t magnitudes = 1;
  std::size_t phases = 2;
  std::size_t trials = 200;
  std::uint64_t seed = 1;
  std::string output;
  bool fresh_signal = false;
  std::size_t max_scans = 0;
};

void add_experiment_flags(CLI::App* cmd, CliExperiment& e) {
  cmd->add_option("--mode", e.mode, "noiseless, noisy_ml or noisy_clustered")
      ->check(CLI::IsMember({"noiseless", "noisy_ml", "noisy_clustered"}));
  cmd->add_option("--n", e.n, "signal length N");
  cmd->add_option("--k", e.k, "sparsity K");
  cmd->add_option("--ensemble", e.ensemble, "regular or irregular")
      ->check(CLI::IsMember({"regular", "irregular"}));
  cmd->add_option("--d", e.d, "left degree (regular)");
  cmd->add_option("--max-degree", e.max_degree, "max degree parameter D (irregular)");
  cmd->add_option("--eta", e.eta, "bins per sparsity R/K");
  cmd->add_option("--eps", e.eps, "irregular slack; sets R = (1+eps)K");
  cmd->add_option("--p", e.p, "rows per bin, random flavor (0 = ceil(3 ln N))");
  cmd->add_option("--clusters", e.clusters, "cluster count (0 = ceil(log2 N))");
  cmd->add_option("--per-cluster", e.per_cluster, "rows per cluster (0 = ceil(3 (ln N)^(1/3)))");
  cmd->add_option("--snr", e.snr, "target SNR in dB (noisy modes)");
  cmd->add_option("--gamma", e.gamma, "detector slack in (0,1)");
  cmd->add_option("--a-min", e.a_min, "smallest alphabet magnitude");
  cmd->add_option("--rho-step", e.rho_step, "alphabet magnitude step");
  cmd->add_option("--magnitudes", e.magnitudes, "alphabet magnitude count");
  cmd->add_option("--phases", e.phases, "alphabet phase count");
  cmd->add_option("--trials", e.trials, "trials per grid point");
  cmd->add_option("--seed", e.seed, "master seed");
  cmd->add_option("--output", e.output, "output path (default stdout)");
  cmd->add_flag("--fresh-signal", e.fresh_signal, "draw a new signal per trial");
  cmd->add_option("--max-scans", e.max_scans, "peeling scan cap (0 = 2K+16)");
  cmd->set_config("--config", "", "flat key=value config file");
}

sgcs::ExperimentConfig to_config(const CliExperiment& e) {
  sgcs::ExperimentConfig cfg;
  cfg.mode = e.mode == "noiseless" ? sgcs::Mode::noiseless
             : e.mode == "noisy_ml" ? sgcs::Mode::noisy_ml
                                    : sgcs::Mode::noisy_clustered;
  cfg.n = e.n;
  cfg.k = e.k;
  cfg.ensemble.kind =
      e.ensemble == "regular" ? sgcs::EnsembleKind::regular : sgcs::EnsembleKind::irregular;
  cfg.ensemble.d = e.d;
  cfg.ensemble.max_degree = e.max_degree;
  cfg.ensemble.eta = cfg.ensemble.kind == sgcs::EnsembleKind::irregular && e.eps >= 0.0
                         ? 1.0 + e.eps
                         : e.eta;
  cfg.p = e.p;
  cfg.clusters = e.clusters;
  cfg.per_cluster = e.per_cluster;
  cfg.snr_db = e.snr;
  cfg.gamma = e.gamma;
  cfg.alphabet.a_min = e.a_min;
  cfg.alphabet.rho_step = e.rho_step;
  cfg.alphabet.magnitude_count = e.magnitudes;
  cfg.alphabet.phase_count = e.phases;
  cfg.trials = e.trials;
  cfg.seed = e.seed;
  cfg.output = e.output;
  cfg.fixed_signal = !e.fresh_signal;
  cfg.max_scans = e.max_scans;
  return cfg;
}

// Returns stdout unless a path was given.
std::ostream& open_sink(const std::string& path, std::ofstream& file) {
  if (path.empty()) return std::cout;
  file.open(path);
  if (!file) throw std::runtime_error("cannot write " + path);
  return file;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sparse support recovery via coded bins: experiments and thresholds"};
  app.require_subcommand(1);

  auto* threshold = app.add_subcommand("threshold", "minimum redundancy per regular degree");
  std::size_t d_min = 2, d_max = 6;
  double th_tol = 1e-4;
  std::string th_output;
  threshold->add_option("--d-min", d_min, "first degree");
  threshold->add_option("--d-max", d_max, "last degree");
  threshold->add_option("--tol", th_tol, "bisection tolerance");
  threshold->add_option("--output", th_output, "output path (default stdout)");

  auto* detrace = app.add_subcommand("de-trace", "density evolution trace from p0 = 1");
  sgcs::DEParams de;
  std::string de_kind = "regular";
  std::string de_output;
  detrace->add_option("--kind", de_kind, "regular or irregular")
      ->check(CLI::IsMember({"regular", "irregular"}));
  detrace->add_option("--d", de.d, "left degree (regular)");
  detrace->add_option("--eta", de.eta, "redundancy R/K (regular)");
  detrace->add_option("--max-degree", de.max_degree, "max degree D (irregular)");
  detrace->add_option("--eps", de.eps, "redundancy slack (irregular)");
  detrace->add_option("--max-iters", de.max_iters, "iteration cap");
  detrace->add_option("--tol", de.tol, "convergence tolerance");
  detrace->add_option("--output", de_output, "output path (default stdout)");

  CliExperiment run_exp;
  std::size_t trial_index = 0;
  auto* run = app.add_subcommand("run", "one trial, human-readable report");
  add_experiment_flags(run, run_exp);
  run->add_option("--trial", trial_index, "trial index under the master seed");

  CliExperiment sweep_exp;
  std::vector<std::size_t> n_list, k_list;
  std::vector<double> eta_list, snr_list;
  unsigned threads = 0;
  auto* sweep = app.add_subcommand("sweep", "Monte-Carlo grid, CSV per point");
  add_experiment_flags(sweep, sweep_exp);
  sweep->add_option("--n-list", n_list, "signal lengths")->delimiter(',');
  sweep->add_option("--k-list", k_list, "sparsities")->delimiter(',');
  sweep->add_option("--eta-list", eta_list, "redundancy values R/K")->delimiter(',');
  sweep->add_option("--snr-list", snr_list, "SNR values in dB")->delimiter(',');
  sweep->add_option("--threads", threads, "worker threads (0 = hardware)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (threshold->parsed()) {
      std::ofstream file;
      auto& out = open_sink(th_output, file);
      out << "d,min_eta\n";
      char buf[32];
      for (std::size_t d = d_min; d <= d_max; ++d) {
        std::snprintf(buf, sizeof buf, "%.4f", sgcs::min_eta(d, th_tol));
        out << d << ',' << buf << '\n';
      }
    } else if (detrace->parsed()) {
      de.kind = de_kind == "regular" ? sgcs::EnsembleKind::regular : sgcs::EnsembleKind::irregular;
      const sgcs::DETrace trace = sgcs::de_trace(de);
      std::ofstream file;
      auto& out = open_sink(de_output, file);
      out << "iter,p\n";
      char buf[32];
      for (std::size_t i = 0; i < trace.densities.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.8e", trace.densities[i]);
        out << i << ',' << buf << '\n';
      }
    } else if (run->parsed()) {
      const sgcs::ExperimentConfig cfg = to_config(run_exp);
      const sgcs::TrialRecord rec = sgcs::run_trial(cfg, trial_index);
      const auto r = std::max<long long>(
          1, std::llround(cfg.ensemble.eta * static_cast<double>(cfg.k)));
      std::ofstream file;
      auto& out = open_sink(cfg.output, file);
      out << "mode            " << run_exp.mode << '\n'
          << "N, K            " << cfg.n << ", " << cfg.k << '\n'
          << "bins R          " << r << '\n'
          << "rows per bin    " << rec.measurements / static_cast<std::size_t>(r) << '\n'
          << "measurements M  " << rec.measurements << '\n'
          << "trial           " << rec.trial << '\n'
          << "success         " << (rec.success ? "yes" : "no") << '\n'
          << "scans           " << rec.iterations << '\n'
          << "decode seconds  " << rec.decode_seconds << '\n';
    } else if (sweep->parsed()) {
      sgcs::SweepGrid grid;
      grid.base = to_config(sweep_exp);
      grid.n_values = n_list;
      grid.k_values = k_list;
      grid.eta_values = eta_list;
      grid.snr_values = snr_list;
      std::ofstream file;
      auto& out = open_sink(grid.base.output, file);
      sgcs::sweep(grid, out, threads);
    }
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << '\n';
    return 1;
  }
  return 0;
}
