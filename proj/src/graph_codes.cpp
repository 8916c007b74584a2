#include "sgcs/graph_codes.hpp"

#include <algorithm>
#include <bit>
#include <stdexcept>
#include <string>

namespace sgcs {

std::size_t CodingMatrix::edge_count() const {
  std::size_t e = 0;
  for (const auto& c : col_support) e += c.size();
  return e;
}

double CodingMatrix::average_left_degree() const {
  if (n_left == 0) return 0.0;
  return static_cast<double>(edge_count()) / static_cast<double>(n_left);
}

namespace {

// d distinct rows out of r, ascending. Rejection for small d, partial
// Fisher-Yates otherwise (d close to r would make rejection spin).
void sample_rows(Rng& rng, std::size_t r, std::size_t d, std::vector<std::uint32_t>& out) {
  out.clear();
  if (d * 2 <= r && d <= 16) {
    while (out.size() < d) {
      const auto cand = static_cast<std::uint32_t>(rng.below(r));
      if (std::find(out.begin(), out.end(), cand) == out.end()) out.push_back(cand);
    }
  } else {
    std::vector<std::uint32_t> pool(r);
    for (std::size_t i = 0; i < r; ++i) pool[i] = static_cast<std::uint32_t>(i);
    for (std::size_t i = 0; i < d; ++i) {
      const std::size_t j = i + rng.below(r - i);
      std::swap(pool[i], pool[j]);
    }
    out.assign(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(d));
  }
  std::sort(out.begin(), out.end());
}

CodingMatrix from_columns(std::size_t n, std::size_t r,
                          std::vector<std::vector<std::uint32_t>>&& cols) {
  CodingMatrix h;
  h.n_left = n;
  h.n_right = r;
  h.col_support = std::move(cols);
  h.row_support.assign(r, {});
  for (std::size_t k = 0; k < n; ++k)
    for (const auto row : h.col_support[k])
      h.row_support[row].push_back(static_cast<std::uint32_t>(k));
  // columns were appended in ascending k, so row lists are already sorted
  return h;
}

}  // namespace

CodingMatrix sample_regular(std::size_t n, std::size_t r, std::size_t d, Seed seed) {
  if (r == 0 || d == 0) throw std::invalid_argument("sample_regular: r and d must be positive");
  if (d > r)
    throw std::invalid_argument("sample_regular: left degree " + std::to_string(d) +
                                " exceeds right node count " + std::to_string(r));
  Rng rng(seed);
  std::vector<std::vector<std::uint32_t>> cols(n);
  for (std::size_t k = 0; k < n; ++k) sample_rows(rng, r, d, cols[k]);
  return from_columns(n, r, std::move(cols));
}

double harmonic(std::size_t d) {
  double h = 0.0;
  for (std::size_t j = 1; j <= d; ++j) h += 1.0 / static_cast<double>(j);
  return h;
}

std::vector<double> irregular_edge_fractions(std::size_t max_degree) {
  if (max_degree < 1) throw std::invalid_argument("irregular_edge_fractions: D must be >= 1");
  const double hd = harmonic(max_degree);
  std::vector<double> lambda(max_degree);
  for (std::size_t j = 2; j <= max_degree + 1; ++j)
    lambda[j - 2] = 1.0 / (hd * static_cast<double>(j - 1));
  return lambda;
}

double irregular_average_degree(std::size_t max_degree) {
  return harmonic(max_degree) * (1.0 + 1.0 / static_cast<double>(max_degree));
}

CodingMatrix sample_irregular(std::size_t n, std::size_t r, std::size_t max_degree, Seed seed) {
  if (r == 0) throw std::invalid_argument("sample_irregular: r must be positive");
  if (max_degree < 1) throw std::invalid_argument("sample_irregular: D must be >= 1");
  // node-perspective degree law: nu_j proportional to lambda_j / j
  const auto lambda = irregular_edge_fractions(max_degree);
  std::vector<double> cdf(lambda.size());
  double total = 0.0;
  for (std::size_t i = 0; i < lambda.size(); ++i) {
    total += lambda[i] / static_cast<double>(i + 2);
    cdf[i] = total;
  }
  for (auto& c : cdf) c /= total;

  Rng rng(seed);
  std::vector<std::vector<std::uint32_t>> cols(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double u = rng.uniform();
    const auto it = std::lower_bound(cdf.begin(), cdf.end(), u);
    const std::size_t deg = 2 + static_cast<std::size_t>(it - cdf.begin());
    if (deg > r)
      throw std::invalid_argument("sample_irregular: sampled degree " + std::to_string(deg) +
                                  " exceeds right node count " + std::to_string(r));
    sample_rows(rng, r, deg, cols[k]);
  }
  return from_columns(n, r, std::move(cols));
}

CodingMatrix prune(const CodingMatrix& h, std::span<const std::uint32_t> support) {
  std::vector<std::uint32_t> keep(support.begin(), support.end());
  std::sort(keep.begin(), keep.end());
  keep.erase(std::unique(keep.begin(), keep.end()), keep.end());
  if (!keep.empty() && keep.back() >= h.n_left)
    throw std::invalid_argument("prune: support index out of range");

  std::vector<std::vector<std::uint32_t>> cols;
  cols.reserve(keep.size());
  for (const auto k : keep) cols.push_back(h.col_support[k]);
  return from_columns(keep.size(), h.n_right, std::move(cols));
}

namespace {

std::size_t subset_work(std::size_t k, std::size_t max_size, std::size_t cap) {
  // sum of C(k, t) for t = 1..max_size, saturating at cap
  std::size_t total = 0;
  double binom = 1.0;
  for (std::size_t t = 1; t <= max_size; ++t) {
    binom *= static_cast<double>(k - t + 1) / static_cast<double>(t);
    if (binom > static_cast<double>(cap)) return cap + 1;
    total += static_cast<std::size_t>(binom);
    if (total > cap) return cap + 1;
  }
  return total;
}

}  // namespace

bool is_expander(const CodingMatrix& pruned, double eps, std::size_t d, std::size_t work_cap) {
  const std::size_t k = pruned.n_left;
  for (const auto& c : pruned.col_support)
    if (c.size() != d) throw std::invalid_argument("is_expander: graph is not left-d-regular");
  const auto max_size = static_cast<std::size_t>(eps * static_cast<double>(k));
  if (max_size == 0) return true;
  if (subset_work(k, std::min(max_size, k), work_cap) > work_cap)
    throw std::runtime_error("is_expander: subset enumeration exceeds work cap");

  // neighbourhood sizes via bitmask words over right nodes
  const std::size_t words = (pruned.n_right + 63) / 64;
  std::vector<std::uint64_t> masks(k * words, 0);
  for (std::size_t c = 0; c < k; ++c)
    for (const auto row : pruned.col_support[c])
      masks[c * words + row / 64] |= std::uint64_t{1} << (row % 64);

  std::vector<std::uint64_t> acc((std::min(max_size, k) + 1) * words, 0);
  std::vector<std::size_t> pick;
  // iterative depth-first enumeration of subsets up to max_size
  bool ok = true;
  auto neighbours = [&](std::size_t depth) {
    std::size_t count = 0;
    for (std::size_t w = 0; w < words; ++w) count += std::popcount(acc[depth * words + w]);
    return count;
  };
  auto expand = [&](auto&& self, std::size_t first, std::size_t depth) -> void {
    if (!ok || depth > std::min(max_size, k)) return;
    for (std::size_t c = first; c < k && ok; ++c) {
      for (std::size_t w = 0; w < words; ++w)
        acc[depth * words + w] = acc[(depth - 1) * words + w] | masks[c * words + w];
      if (2 * neighbours(depth) <= d * depth) {
        ok = false;
        return;
      }
      if (depth < std::min(max_size, k)) self(self, c + 1, depth + 1);
    }
  };
  expand(expand, 0, 1);
  return ok;
}

bool transpose_consistent(const CodingMatrix& h) {
  std::size_t row_edges = 0;
  for (std::size_t r = 0; r < h.n_right; ++r) {
    for (const auto k : h.row_support[r]) {
      if (k >= h.n_left) return false;
      const auto& col = h.col_support[k];
      if (!std::binary_search(col.begin(), col.end(), static_cast<std::uint32_t>(r))) return false;
    }
    row_edges += h.row_support[r].size();
  }
  return row_edges == h.edge_count();
}

}  // namespace sgcs
