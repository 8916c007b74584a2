#pragma once

#include <cstddef>
#include <cstdint>
#include <span>

#include "sgcs/rng.hpp"

namespace sgcs {

struct BinHypothesis {
  enum class Kind { zero_ton, single_ton, multi_ton };

  Kind kind = Kind::multi_ton;
  std::uint32_t index = 0;  // meaningful for single_ton only
  cplx value{0.0, 0.0};

  static BinHypothesis zero() { return {Kind::zero_ton, 0, {0.0, 0.0}}; }
  static BinHypothesis single(std::uint32_t k, cplx v) { return {Kind::single_ton, k, v}; }
  static BinHypothesis multi() { return {Kind::multi_ton, 0, {0.0, 0.0}}; }
};

struct RatioTestTolerances {
  double energy_abs = 1e-12;     // per-sample mean energy for the zero-ton test
  double magnitude_rel = 1e-6;   // |y1| vs |y0| agreement
  double index_abs = 1e-6;       // distance of theta N / 2 pi from the nearest integer
};

// The two-sample ratio test. y has length 2, g holds the per-column
// scalings G_k, n is the signal length. A single-ton at k with value v
// produces y = (G_k v, G_k v W^k), so the phase of y[1]/y[0] localizes k
// and y[0]/G_k recovers the value. Half-integer phases round to even.
BinHypothesis classify_noiseless(std::span<const cplx> y, std::span<const double> g,
                                 std::size_t n, const RatioTestTolerances& tol = {});

}  // namespace sgcs
