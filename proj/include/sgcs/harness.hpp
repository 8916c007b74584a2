#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "sgcs/graph_codes.hpp"
#include "sgcs/measurement.hpp"
#include "sgcs/peeling.hpp"
#include "sgcs/rng.hpp"

namespace sgcs {

enum class Mode { noiseless, noisy_ml, noisy_clustered };

struct ExperimentConfig {
  Mode mode = Mode::noiseless;
  std::size_t n = 10000;
  std::size_t k = 100;
  EnsembleSpec ensemble;
  std::size_t p = 0;            // rows per bin, random flavor; 0 = ceil(3 ln N)
  std::size_t clusters = 0;     // 0 = ceil(log2 N)
  std::size_t per_cluster = 0;  // 0 = ceil(3 (ln N)^(1/3))
  double snr_db = 20.0;
  double gamma = 0.2;
  Alphabet alphabet;  // defaults to {+1, -1}
  std::size_t trials = 200;
  Seed seed = 1;
  std::string output;  // empty = stdout
  bool fixed_signal = true;
  std::size_t max_scans = 0;  // 0 = 2K + 16
};

struct TrialRecord {
  std::size_t trial = 0;
  bool success = false;  // recovered support equals the true support
  double decode_seconds = 0.0;
  std::size_t measurements = 0;  // R * P
  std::size_t iterations = 0;
};

std::size_t default_rows_per_bin(std::size_t n);
std::size_t default_clusters(std::size_t n);
std::size_t default_per_cluster(std::size_t n);

// Support uniform without replacement, values uniform over the alphabet.
SparseSignal gen_signal(std::size_t n, std::size_t k, const Alphabet& alphabet, Seed seed);

// sigma2 = |x|^2 dbar / (R 10^(snr/10)), dbar the realized average left degree.
double snr_to_sigma2(const SparseSignal& x, const CodingMatrix& h, double snr_db);

// Samples graph, detection matrix and noise from streams split off the trial
// seed (the signal comes from the config seed when fixed_signal is set), then
// decodes. Only the decode phase is timed.
TrialRecord run_trial(const ExperimentConfig& cfg, std::size_t trial_index);

// Work pool over independent trials; records land in trial order. threads = 0
// picks the hardware count.
std::vector<TrialRecord> run_trials(const ExperimentConfig& cfg, unsigned threads = 0);

struct SweepGrid {
  ExperimentConfig base;
  std::vector<std::size_t> n_values;  // empty lists fall back to the base value
  std::vector<std::size_t> k_values;
  std::vector<double> eta_values;  // redundancy R/K; irregular rows print eta - 1
  std::vector<double> snr_values;  // ignored in noiseless mode
};

extern const char* const kSweepCsvHeader;

// One CSV row per grid point, nested loop order n, k, eta, snr. Row seeds are
// split off the master seed by grid index, so rows never share streams.
void sweep(const SweepGrid& grid, std::ostream& out, unsigned threads = 0);

}  // namespace sgcs
