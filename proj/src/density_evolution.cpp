#include "sgcs/density_evolution.hpp"

#include <cmath>
#include <stdexcept>

namespace sgcs {

namespace {

double ipow(double x, std::size_t e) {
  double acc = 1.0;
  while (e) {
    if (e & 1) acc *= x;
    x *= x;
    e >>= 1;
  }
  return acc;
}

double clamp01(double p) {
  if (p < 0.0) return 0.0;
  if (p > 1.0) return 1.0;
  return p;
}

}  // namespace

double de_step_regular(double p, std::size_t d, double eta) {
  if (d < 2) throw std::invalid_argument("de_step_regular: d must be >= 2");
  if (eta <= 0.0) throw std::invalid_argument("de_step_regular: eta must be positive");
  const double inner = 1.0 - std::exp(-(static_cast<double>(d) / eta) * p);
  return clamp01(ipow(inner, d - 1));
}

double irregular_lambda(double x, std::size_t max_degree) {
  // sum_{m=1..D} x^m / m, Horner from the top
  double acc = 0.0;
  for (std::size_t m = max_degree; m > 0; --m) {
    acc = acc * x + 1.0 / static_cast<double>(m);
  }
  return acc * x / harmonic(max_degree);
}

double irregular_rho(double x, std::size_t max_degree, double eps) {
  const double dbar = irregular_average_degree(max_degree);
  return std::exp(-dbar * (1.0 - x) / (1.0 + eps));
}

double de_step_irregular(double p, std::size_t max_degree, double eps) {
  if (max_degree < 1) throw std::invalid_argument("de_step_irregular: D must be >= 1");
  if (eps <= 0.0) throw std::invalid_argument("de_step_irregular: eps must be positive");
  return clamp01(irregular_lambda(1.0 - irregular_rho(1.0 - p, max_degree, eps), max_degree));
}

DETrace de_trace(const DEParams& params) {
  DETrace trace;
  double p = 1.0;
  trace.densities.push_back(p);
  for (std::size_t i = 0; i < params.max_iters; ++i) {
    const double next = params.kind == EnsembleKind::regular
                            ? de_step_regular(p, params.d, params.eta)
                            : de_step_irregular(p, params.max_degree, params.eps);
    trace.densities.push_back(next);
    if (next < params.tol) {
      trace.converged = true;
      return trace;
    }
    if (std::abs(next - p) < params.tol) {
      trace.fixed_point = next;
      return trace;
    }
    p = next;
  }
  return trace;
}

namespace {

// Strict contraction on a uniform grid of (0,1]. The near-threshold
// violation window is O(sqrt(eta - eta*)) wide, far above the 1e-4 grid
// spacing at the tolerances used here.
bool contracts_on_grid(std::size_t d, double eta) {
  constexpr std::size_t kGrid = 10000;
  for (std::size_t i = 1; i <= kGrid; ++i) {
    const double p = static_cast<double>(i) / kGrid;
    if (de_step_regular(p, d, eta) >= p) return false;
  }
  return true;
}

}  // namespace

double min_eta(std::size_t d, double tol) {
  if (d < 2) throw std::invalid_argument("min_eta: d must be >= 2");
  if (tol <= 0.0) throw std::invalid_argument("min_eta: tol must be positive");
  double lo = 0.5;  // never contracts this low for d >= 2
  double hi = 4.0;
  while (!contracts_on_grid(d, hi)) hi *= 2.0;  // d <= 6 contracts well below 4
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (contracts_on_grid(d, mid))
      hi = mid;
    else
      lo = mid;
  }
  return hi;
}

}  // namespace sgcs
