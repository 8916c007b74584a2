#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "sgcs/graph_codes.hpp"

namespace sgcs {

struct DEParams {
  EnsembleKind kind = EnsembleKind::regular;
  std::size_t d = 3;             // regular left degree
  double eta = 1.5;              // R/K (regular)
  std::size_t max_degree = 100;  // D (irregular)
  double eps = 0.1;              // R = (1+eps)K (irregular)
  std::size_t max_iters = 1000;
  double tol = 1e-8;
};

struct DETrace {
  std::vector<double> densities;  // p_0 = 1, then one entry per iteration
  bool converged = false;         // reached p < tol
  std::optional<double> fixed_point;  // stall value when the map stops moving above tol
};

// One step of the erasure-density recursion for the regular ensemble:
// p -> (1 - exp(-(d/eta) p))^(d-1).
double de_step_regular(double p, std::size_t d, double eta);

// Irregular step p -> lambda(1 - rho(1 - p)) with
// lambda(x) = (1/H(D)) sum_{j=2..D+1} x^(j-1)/(j-1) and
// rho(x) = exp(-dbar (1-x)/(1+eps)), dbar = H(D)(1+1/D).
double de_step_irregular(double p, std::size_t max_degree, double eps);

// Edge-perspective degree polynomial lambda(x), evaluated by Horner.
double irregular_lambda(double x, std::size_t max_degree);

// Check-side polynomial rho(x) under the Poisson approximation.
double irregular_rho(double x, std::size_t max_degree, double eps);

// Iterate from p_0 = 1 until convergence (p < tol), stall
// (|p_i - p_{i-1}| < tol with p_i >= tol) or max_iters.
DETrace de_trace(const DEParams& params);

// Smallest eta such that the regular map satisfies f(p) < p on a uniform
// 1e4-point grid of (0,1], located by bisection to the given tolerance.
double min_eta(std::size_t d, double tol = 1e-4);

}  // namespace sgcs
