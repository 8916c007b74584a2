#include "sgcs/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>
#include <thread>
#include <unordered_set>

#include "sgcs/detect_noiseless.hpp"
#include "sgcs/detect_noisy.hpp"

namespace sgcs {

namespace {

// Stream ids hung off a trial seed (and off the config seed for the shared
// signal, so every trial of a fixed-signal experiment sees the same x).
constexpr std::uint64_t kSignalStream = 0;
constexpr std::uint64_t kGraphStream = 1;
constexpr std::uint64_t kMatrixStream = 2;
constexpr std::uint64_t kNoiseStream = 3;

std::size_t bins_for(const ExperimentConfig& cfg) {
  const auto r = std::llround(cfg.ensemble.eta * static_cast<double>(cfg.k));
  return r < 1 ? 1 : static_cast<std::size_t>(r);
}

void validate(const ExperimentConfig& cfg) {
  if (cfg.k > cfg.n) throw std::invalid_argument("config: K exceeds N");
  if (cfg.n < 2) throw std::invalid_argument("config: N too small");
  if (cfg.ensemble.eta <= 0.0) throw std::invalid_argument("config: eta must be positive");
  if (cfg.mode != Mode::noiseless) {
    if (cfg.gamma <= 0.0 || cfg.gamma >= 1.0)
      throw std::invalid_argument("config: gamma outside (0,1)");
    if (!std::isfinite(cfg.snr_db)) throw std::invalid_argument("config: snr_db not finite");
    if (cfg.alphabet.size() == 0) throw std::invalid_argument("config: empty alphabet");
  }
  if (cfg.mode == Mode::noisy_clustered && cfg.n % 2 == 0)
    throw std::invalid_argument("config: clustered mode needs odd N");
  if (cfg.ensemble.kind == EnsembleKind::regular && bins_for(cfg) < cfg.ensemble.d)
    throw std::invalid_argument("config: fewer bins than the left degree");
}

}  // namespace

std::size_t default_rows_per_bin(std::size_t n) {
  return static_cast<std::size_t>(std::ceil(3.0 * std::log(static_cast<double>(n))));
}

std::size_t default_clusters(std::size_t n) {
  return static_cast<std::size_t>(std::ceil(std::log2(static_cast<double>(n))));
}

std::size_t default_per_cluster(std::size_t n) {
  return static_cast<std::size_t>(std::ceil(3.0 * std::cbrt(std::log(static_cast<double>(n)))));
}

SparseSignal gen_signal(std::size_t n, std::size_t k, const Alphabet& alphabet, Seed seed) {
  if (k > n) throw std::invalid_argument("gen_signal: K exceeds N");
  if (alphabet.size() == 0) throw std::invalid_argument("gen_signal: empty alphabet");
  Rng rng(seed);

  // Floyd's sampling: uniform K-subset without replacement.
  std::unordered_set<std::uint64_t> picked;
  picked.reserve(k * 2);
  for (std::uint64_t j = n - k; j < n; ++j) {
    const std::uint64_t t = rng.below(j + 1);
    picked.insert(picked.count(t) ? j : t);
  }
  std::vector<std::uint32_t> support(picked.begin(), picked.end());
  std::sort(support.begin(), support.end());

  SparseSignal x;
  x.n = n;
  x.entries.reserve(k);
  for (const auto idx : support) {
    const std::uint64_t m = rng.below(alphabet.size());
    x.entries.emplace_back(idx, alphabet.member(m / alphabet.phase_count, m % alphabet.phase_count));
  }
  return x;
}

double snr_to_sigma2(const SparseSignal& x, const CodingMatrix& h, double snr_db) {
  if (!std::isfinite(snr_db)) throw std::invalid_argument("snr_to_sigma2: snr_db not finite");
  const double r = static_cast<double>(h.n_right);
  return x.energy() * h.average_left_degree() / (r * std::pow(10.0, snr_db / 10.0));
}

TrialRecord run_trial(const ExperimentConfig& cfg, std::size_t trial_index) {
  validate(cfg);
  const Seed trial_seed = derive_seed(cfg.seed, trial_index);
  const Seed signal_seed =
      cfg.fixed_signal ? derive_seed(cfg.seed, kSignalStream) : derive_seed(trial_seed, kSignalStream);

  const SparseSignal x = gen_signal(cfg.n, cfg.k, cfg.alphabet, signal_seed);
  const std::size_t r = bins_for(cfg);

  const CodingMatrix h =
      cfg.ensemble.kind == EnsembleKind::regular
          ? sample_regular(cfg.n, r, cfg.ensemble.d, derive_seed(trial_seed, kGraphStream))
          : sample_irregular(cfg.n, r, cfg.ensemble.max_degree,
                             derive_seed(trial_seed, kGraphStream));

  BinDetectionMatrix s;
  const Seed s_seed = derive_seed(trial_seed, kMatrixStream);
  switch (cfg.mode) {
    case Mode::noiseless:
      s = build_noiseless_S(cfg.n, s_seed);
      break;
    case Mode::noisy_ml:
      s = build_random_S(cfg.n, cfg.p ? cfg.p : default_rows_per_bin(cfg.n), s_seed);
      break;
    case Mode::noisy_clustered:
      s = build_clustered_S(cfg.n, cfg.clusters ? cfg.clusters : default_clusters(cfg.n),
                            cfg.per_cluster ? cfg.per_cluster : default_per_cluster(cfg.n), s_seed);
      break;
  }

  const double sigma2 = cfg.mode == Mode::noiseless ? 0.0 : snr_to_sigma2(x, h, cfg.snr_db);
  const BinMeasurementSet bins = measure(x, h, s, sigma2, derive_seed(trial_seed, kNoiseStream));

  BinClassifier classify;
  if (cfg.mode == Mode::noiseless) {
    classify = [&s](std::size_t, std::span<const cplx> y) {
      return classify_noiseless(y, s.scaling, s.n);
    };
  } else {
    DetectorConfig det;
    det.gamma = cfg.gamma;
    det.sigma2 = sigma2;
    det.alphabet = cfg.alphabet;
    det.flavor = cfg.mode == Mode::noisy_ml ? SearchFlavor::ml : SearchFlavor::clustered;
    classify = [&s, &h, det](std::size_t bin, std::span<const cplx> y) {
      return robust_bin_detect(y, s, h.row_support[bin], det);
    };
  }

  const std::size_t cap = cfg.max_scans ? cfg.max_scans : 2 * cfg.k + 16;
  const auto t0 = std::chrono::steady_clock::now();
  const DecodeReport report = peel_decode(bins, h, s, classify, cap);
  const auto t1 = std::chrono::steady_clock::now();

  TrialRecord rec;
  rec.trial = trial_index;
  rec.decode_seconds = std::chrono::duration<double>(t1 - t0).count();
  rec.measurements = r * s.rows;
  rec.iterations = report.iterations;
  // Success is the exact support match, not the decoder's own status: a bin
  // whose frozen noise sits above the energy threshold keeps the status at
  // stalled without affecting which indices were recovered.
  rec.success = report.recovered.size() == x.entries.size();
  if (rec.success)
    for (std::size_t i = 0; i < x.entries.size(); ++i)
      if (report.recovered[i].first != x.entries[i].first) {
        rec.success = false;
        break;
      }
  return rec;
}

std::vector<TrialRecord> run_trials(const ExperimentConfig& cfg, unsigned threads) {
  if (cfg.trials < 1) throw std::invalid_argument("run_trials: need at least one trial");
  validate(cfg);
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, cfg.trials));

  std::vector<TrialRecord> records(cfg.trials);
  if (threads <= 1) {
    for (std::size_t t = 0; t < cfg.trials; ++t) records[t] = run_trial(cfg, t);
    return records;
  }

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (;;) {
      const std::size_t t = next.fetch_add(1);
      if (t >= cfg.trials) return;
      records[t] = run_trial(cfg, t);
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (unsigned i = 0; i < threads; ++i) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  return records;
}

const char* const kSweepCsvHeader =
    "mode,N,K,eta_or_eps,d_or_D,P,C,Q,snr_db,trials,success_rate,mean_decode_time_s,measurements";

namespace {

const char* mode_name(Mode m) {
  switch (m) {
    case Mode::noiseless:
      return "noiseless";
    case Mode::noisy_ml:
      return "noisy_ml";
    default:
      return "noisy_clustered";
  }
}

}  // namespace

void sweep(const SweepGrid& grid, std::ostream& out, unsigned threads) {
  const auto& base = grid.base;
  const std::vector<std::size_t> ns = grid.n_values.empty()
                                          ? std::vector<std::size_t>{base.n}
                                          : grid.n_values;
  const std::vector<std::size_t> ks = grid.k_values.empty()
                                          ? std::vector<std::size_t>{base.k}
                                          : grid.k_values;
  const std::vector<double> etas =
      grid.eta_values.empty() ? std::vector<double>{base.ensemble.eta} : grid.eta_values;
  const std::vector<double> snrs =
      grid.snr_values.empty() ? std::vector<double>{base.snr_db} : grid.snr_values;

  out << kSweepCsvHeader << '\n';
  std::uint64_t row = 0;
  char buf[64];
  for (const auto n : ns)
    for (const auto k : ks)
      for (const auto eta : etas)
        for (const auto snr : snrs) {
          ExperimentConfig cfg = base;
          cfg.n = n;
          cfg.k = k;
          cfg.ensemble.eta = eta;
          cfg.snr_db = snr;
          cfg.seed = derive_seed(base.seed, row++);
          const auto records = run_trials(cfg, threads);

          double hits = 0.0, secs = 0.0;
          for (const auto& rec : records) {
            hits += rec.success ? 1.0 : 0.0;
            secs += rec.decode_seconds;
          }
          const auto trials = static_cast<double>(records.size());
          const std::size_t measurements = records.front().measurements;
          const std::size_t rows_per_bin = measurements / bins_for(cfg);

          const bool regular = cfg.ensemble.kind == EnsembleKind::regular;
          out << mode_name(cfg.mode) << ',' << n << ',' << k << ',';
          std::snprintf(buf, sizeof buf, "%.4f", regular ? eta : eta - 1.0);
          out << buf << ',' << (regular ? cfg.ensemble.d : cfg.ensemble.max_degree) << ','
              << rows_per_bin << ',';
          if (cfg.mode == Mode::noisy_clustered) {
            out << (cfg.clusters ? cfg.clusters : default_clusters(n)) << ','
                << (cfg.per_cluster ? cfg.per_cluster : default_per_cluster(n)) << ',';
          } else {
            out << 0 << ',' << 0 << ',';
          }
          if (cfg.mode == Mode::noiseless) {
            out << "inf,";
          } else {
            std::snprintf(buf, sizeof buf, "%.2f", snr);
            out << buf << ',';
          }
          out << records.size() << ',';
          std::snprintf(buf, sizeof buf, "%.4f", hits / trials);
          out << buf << ',';
          std::snprintf(buf, sizeof buf, "%.6e", secs / trials);
          out << buf << ',' << measurements << '\n';
        }
}

}  // namespace sgcs
