#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "sgcs/rng.hpp"

namespace sgcs {

// Sparse bi-adjacency of a left-regular or irregular bipartite graph.
// Left nodes are signal indices, right nodes are measurement bins.
// Both adjacency views are kept; support lists are sorted ascending.
struct CodingMatrix {
  std::size_t n_left = 0;
  std::size_t n_right = 0;
  std::vector<std::vector<std::uint32_t>> row_support;  // per right node
  std::vector<std::vector<std::uint32_t>> col_support;  // per left node

  std::size_t edge_count() const;
  double average_left_degree() const;  // edges / n_left
};

enum class EnsembleKind { regular, irregular };

struct EnsembleSpec {
  EnsembleKind kind = EnsembleKind::regular;
  std::size_t d = 3;            // left degree (regular)
  std::size_t max_degree = 100;  // D: degrees run 2..D+1 (irregular)
  double eta = 1.5;             // R/K for regular, 1+eps for irregular
};

// Each left node picks d distinct right nodes uniformly at random.
CodingMatrix sample_regular(std::size_t n, std::size_t r, std::size_t d, Seed seed);

// Left degrees drawn from the node-perspective version of the edge-degree
// fractions lambda_j = 1/(H(D)(j-1)), j = 2..D+1; rows chosen as in the
// regular ensemble. Throws if a sampled degree exceeds r.
CodingMatrix sample_irregular(std::size_t n, std::size_t r, std::size_t max_degree, Seed seed);

// Harmonic number H(d) = sum_{j=1..d} 1/j.
double harmonic(std::size_t d);

// lambda_j for j = 2..D+1; element [0] is lambda_2.
std::vector<double> irregular_edge_fractions(std::size_t max_degree);

// Average left degree of the irregular ensemble: H(D)(1 + 1/D).
double irregular_average_degree(std::size_t max_degree);

// Restriction to the given columns. Columns are re-indexed 0..|support|-1
// in ascending original order; right nodes keep their labels.
CodingMatrix prune(const CodingMatrix& h, std::span<const std::uint32_t> support);

// Exhaustive (eps, 1/2)-expansion check on a pruned left-d-regular graph:
// every subset S of columns with |S| <= eps*K has |N(S)| > d|S|/2.
// Throws on degree violations or when the subset count exceeds work_cap.
bool is_expander(const CodingMatrix& pruned, double eps, std::size_t d,
                 std::size_t work_cap = std::size_t{1} << 24);

// True when row_support and col_support describe the same edge set.
bool transpose_consistent(const CodingMatrix& h);

}  // namespace sgcs
