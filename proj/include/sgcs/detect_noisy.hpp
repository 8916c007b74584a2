#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "sgcs/detect_noiseless.hpp"
#include "sgcs/measurement.hpp"
#include "sgcs/rng.hpp"

namespace sgcs {

enum class SearchFlavor { ml, clustered };

struct DetectorConfig {
  double gamma = 0.2;       // energy-test slack
  double sigma2 = 0.0;      // known noise variance per sample
  Alphabet alphabet{};      // value grid for quantization
  SearchFlavor flavor = SearchFlavor::ml;
  double energy_floor = 1e-12;  // keeps the tests meaningful at sigma2 = 0
};

// Mean bin energy against (1+gamma) sigma^2 (plus the numerical floor).
bool zero_ton_test(std::span<const cplx> y, const DetectorConfig& cfg);

// Exhaustive least-squares over the candidate columns: fits a_k =
// s_k^H y / |s_k|^2 per candidate, returns the index minimizing the
// residual (ties break to the smallest index) and the fitted value
// quantized to the alphabet.
std::pair<std::uint32_t, cplx> ml_singleton_search(std::span<const cplx> y,
                                                   const BinDetectionMatrix& s,
                                                   std::span<const std::uint32_t> candidates,
                                                   const DetectorConfig& cfg);

// Weights of the weighted-phase frequency estimator; length q-1, sums to 1.
std::vector<double> kay_weights(std::size_t q);

// Raw weighted sum of principal-value phase differences, in [-pi, pi].
// nullopt when any sample is exactly zero (degenerate phase).
std::optional<double> kay_phase_increment(std::span<const cplx> samples);

// Same estimate wrapped to [0, 2 pi).
std::optional<double> kay_estimate(std::span<const cplx> samples);

// Circular arc: [start, start+length) with start in [0, 2 pi); arcs that
// cross the wrap point keep start + length > 2 pi.
struct Arc {
  double start = 0.0;
  double length = 0.0;
};

double arc_total_measure(std::span<const Arc> arcs);
bool arc_contains(const Arc& a, double x);  // x in [0, 2 pi)

// All solutions of 2^level * omega = omega_hat (mod 2 pi) with a half-pi
// certainty window: 2^level arcs of width pi / 2^level. Materialized form,
// intended for small levels.
std::vector<Arc> unwrap_region(double omega_hat, std::size_t level);

// Intersection of `arcs` with unwrap_region(omega_hat, level) without
// materializing the region; cost is O(|arcs|) per call.
std::vector<Arc> intersect_unwrapped(std::span<const Arc> arcs, double omega_hat,
                                     std::size_t level);

// Frequency-localization search over the clustered flavor: per-cluster
// phase-increment estimates, dyadic unwrapping, arc fusion, then residual
// minimization over the surviving on-grid candidates. nullopt when no
// candidate survives (treated as multi-ton by the caller).
std::optional<std::pair<std::uint32_t, cplx>> dft_singleton_search(
    std::span<const cplx> y, const BinDetectionMatrix& s,
    std::span<const std::uint32_t> candidates, const DetectorConfig& cfg);

// Residual energy test of the hypothesis y = xhat * s_k + noise.
bool verify_singleton(std::span<const cplx> y, std::span<const cplx> s_k, cplx xhat,
                      const DetectorConfig& cfg);

// Full bin classification: zero-ton test, flavor search, verification.
BinHypothesis robust_bin_detect(std::span<const cplx> y, const BinDetectionMatrix& s,
                                std::span<const std::uint32_t> candidates,
                                const DetectorConfig& cfg);

}  // namespace sgcs
