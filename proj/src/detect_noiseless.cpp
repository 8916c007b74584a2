#include "sgcs/detect_noiseless.hpp"

#include <cfenv>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace sgcs {

BinHypothesis classify_noiseless(std::span<const cplx> y, std::span<const double> g,
                                 std::size_t n, const RatioTestTolerances& tol) {
  if (y.size() != 2) throw std::invalid_argument("classify_noiseless: expected two samples");
  if (g.size() != n) throw std::invalid_argument("classify_noiseless: scaling length mismatch");
  if (n == 0) throw std::invalid_argument("classify_noiseless: empty signal");

  const double energy = std::norm(y[0]) + std::norm(y[1]);
  if (energy <= tol.energy_abs * 2.0) return BinHypothesis::zero();

  const double m0 = std::abs(y[0]);
  const double m1 = std::abs(y[1]);
  if (m0 == 0.0 || m1 == 0.0) return BinHypothesis::multi();
  if (std::abs(m1 - m0) > tol.magnitude_rel * std::max(m0, m1)) return BinHypothesis::multi();

  double theta = std::arg(y[1] / y[0]);
  if (theta < 0.0) theta += 2.0 * std::numbers::pi;
  const double frac = theta * static_cast<double>(n) / (2.0 * std::numbers::pi);
  const double rounded = std::nearbyint(frac);  // FE_TONEAREST: half to even
  if (std::abs(frac - rounded) > tol.index_abs) return BinHypothesis::multi();

  auto k = static_cast<std::uint64_t>(rounded);
  if (k >= n) k -= n;  // theta just below 2 pi wraps to index 0
  return BinHypothesis::single(static_cast<std::uint32_t>(k), y[0] / g[k]);
}

}  // namespace sgcs
