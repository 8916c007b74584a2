#include "sgcs/measurement.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace sgcs {

std::vector<std::uint32_t> SparseSignal::support() const {
  std::vector<std::uint32_t> s;
  s.reserve(entries.size());
  for (const auto& [k, v] : entries) s.push_back(k);
  return s;
}

double SparseSignal::energy() const {
  double e = 0.0;
  for (const auto& [k, v] : entries) e += std::norm(v);
  return e;
}

cplx Alphabet::member(std::size_t i1, std::size_t i2) const {
  const double mag = a_min + static_cast<double>(i1) * rho_step;
  const double phase = 2.0 * std::numbers::pi * static_cast<double>(i2) /
                       static_cast<double>(phase_count);
  return std::polar(mag, phase);
}

cplx Alphabet::quantize(cplx z) const {
  // Nearest phase first; for a fixed phase error the best magnitude is the
  // grid point closest to |z| cos(err), which makes this exact nearest-member.
  const double theta = std::arg(z);
  const double step = 2.0 * std::numbers::pi / static_cast<double>(phase_count);
  auto i2 = static_cast<long long>(std::llround(theta / step));
  i2 %= static_cast<long long>(phase_count);
  if (i2 < 0) i2 += static_cast<long long>(phase_count);
  const double phase = step * static_cast<double>(i2);
  const double along = std::abs(z) * std::cos(theta - phase);
  long long i1 = 0;
  if (magnitude_count > 1) {
    i1 = std::llround((along - a_min) / rho_step);
    if (i1 < 0) i1 = 0;
    if (i1 >= static_cast<long long>(magnitude_count))
      i1 = static_cast<long long>(magnitude_count) - 1;
  }
  return member(static_cast<std::size_t>(i1), static_cast<std::size_t>(i2));
}

void BinDetectionMatrix::column(std::uint32_t k, std::span<cplx> out) const {
  if (k >= n) throw std::invalid_argument("column: index out of range");
  if (out.size() != rows) throw std::invalid_argument("column: output span has wrong length");
  switch (flavor) {
    case Flavor::noiseless_dft: {
      const double g = scaling[k];
      const double ang = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n);
      out[0] = {g, 0.0};
      out[1] = std::polar(g, ang);
      break;
    }
    case Flavor::random_subgaussian: {
      const cplx* col = entries.data() + static_cast<std::size_t>(k) * rows;
      for (std::size_t p = 0; p < rows; ++p) out[p] = col[p];
      break;
    }
    case Flavor::clustered_dft: {
      const double base = 2.0 * std::numbers::pi / static_cast<double>(n);
      std::size_t p = 0;
      for (std::size_t c = 0; c < clusters; ++c) {
        const std::uint64_t stride = std::uint64_t{1} << c;
        for (std::size_t q = 0; q < per_cluster; ++q, ++p) {
          const std::uint64_t row = (start_rows[c] + q * stride) % n;
          out[p] = std::polar(1.0, base * static_cast<double>((row * k) % n));
        }
      }
      break;
    }
  }
}

BinDetectionMatrix build_noiseless_S(std::size_t n, Seed seed) {
  if (n == 0) throw std::invalid_argument("build_noiseless_S: n must be positive");
  BinDetectionMatrix s;
  s.flavor = BinDetectionMatrix::Flavor::noiseless_dft;
  s.n = n;
  s.rows = 2;
  s.scaling.resize(n);
  Rng rng(seed);
  for (auto& g : s.scaling) g = rng.uniform(1.0, 2.0);
  return s;
}

BinDetectionMatrix build_random_S(std::size_t n, std::size_t p, Seed seed) {
  if (n == 0 || p == 0) throw std::invalid_argument("build_random_S: n and p must be positive");
  BinDetectionMatrix s;
  s.flavor = BinDetectionMatrix::Flavor::random_subgaussian;
  s.n = n;
  s.rows = p;
  s.entries.resize(n * p);
  Rng rng(seed);
  for (auto& e : s.entries) e = rng.cnormal(1.0);
  return s;
}

BinDetectionMatrix build_clustered_S(std::size_t n, std::size_t c, std::size_t q, Seed seed) {
  if (n == 0 || c == 0 || q < 2)
    throw std::invalid_argument("build_clustered_S: need n >= 1, c >= 1, q >= 2");
  if (n % 2 == 0)
    throw std::invalid_argument("build_clustered_S: n must be odd, got " + std::to_string(n));
  if (c >= 63) throw std::invalid_argument("build_clustered_S: too many clusters");
  BinDetectionMatrix s;
  s.flavor = BinDetectionMatrix::Flavor::clustered_dft;
  s.n = n;
  s.rows = c * q;
  s.clusters = c;
  s.per_cluster = q;
  s.start_rows.resize(c);
  Rng rng(seed);
  for (auto& l : s.start_rows) l = static_cast<std::uint32_t>(rng.below(n));
  return s;
}

std::vector<std::vector<cplx>> row_tensor(const CodingMatrix& h, const BinDetectionMatrix& s,
                                          std::size_t cap) {
  if (h.n_left != s.n) throw std::invalid_argument("row_tensor: dimension mismatch");
  if (h.n_left > cap) throw std::runtime_error("row_tensor: n exceeds dense materialization cap");
  const std::size_t p = s.rows;
  std::vector<std::vector<cplx>> b(h.n_right * p, std::vector<cplx>(h.n_left, cplx{0.0, 0.0}));
  std::vector<cplx> col(p);
  for (std::uint32_t k = 0; k < h.n_left; ++k) {
    s.column(k, col);
    for (const auto r : h.col_support[k])
      for (std::size_t q = 0; q < p; ++q) b[r * p + q][k] = col[q];
  }
  return b;
}

BinMeasurementSet measure(const SparseSignal& x, const CodingMatrix& h,
                          const BinDetectionMatrix& s, double sigma2, Seed seed) {
  if (x.n != h.n_left || x.n != s.n) throw std::invalid_argument("measure: dimension mismatch");
  if (sigma2 < 0.0) throw std::invalid_argument("measure: sigma2 must be non-negative");
  const std::size_t p = s.rows;
  BinMeasurementSet out;
  out.rows_per_bin = p;
  out.sigma2 = sigma2;
  out.bins.assign(h.n_right, std::vector<cplx>(p, cplx{0.0, 0.0}));

  std::vector<cplx> col(p);
  for (const auto& [k, v] : x.entries) {
    if (k >= x.n) throw std::invalid_argument("measure: signal index out of range");
    if (h.col_support[k].empty()) continue;
    s.column(k, col);
    for (const auto r : h.col_support[k]) {
      auto& bin = out.bins[r];
      for (std::size_t q = 0; q < p; ++q) bin[q] += v * col[q];
    }
  }
  if (sigma2 > 0.0) {
    for (std::size_t r = 0; r < h.n_right; ++r) {
      Rng rng(derive_seed(seed, r));  // per-bin stream, order-independent
      for (auto& y : out.bins[r]) y += rng.cnormal(sigma2);
    }
  }
  return out;
}

}  // namespace sgcs
