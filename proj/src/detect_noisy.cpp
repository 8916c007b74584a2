#include "sgcs/detect_noisy.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace sgcs {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double wrap_2pi(double x) {
  double y = std::fmod(x, kTwoPi);
  if (y < 0.0) y += kTwoPi;
  return y;
}

double wrap_pi(double x) {
  double y = std::fmod(x + std::numbers::pi, kTwoPi);
  if (y < 0.0) y += kTwoPi;
  return y - std::numbers::pi;
}

double mean_energy(std::span<const cplx> y) {
  double e = 0.0;
  for (const auto& v : y) e += std::norm(v);
  return e / static_cast<double>(y.size());
}

}  // namespace

bool zero_ton_test(std::span<const cplx> y, const DetectorConfig& cfg) {
  if (y.empty()) throw std::invalid_argument("zero_ton_test: empty bin");
  return mean_energy(y) <= (1.0 + cfg.gamma) * cfg.sigma2 + cfg.energy_floor;
}

std::pair<std::uint32_t, cplx> ml_singleton_search(std::span<const cplx> y,
                                                   const BinDetectionMatrix& s,
                                                   std::span<const std::uint32_t> candidates,
                                                   const DetectorConfig& cfg) {
  if (candidates.empty()) throw std::invalid_argument("ml_singleton_search: no candidates");
  if (y.size() != s.rows) throw std::invalid_argument("ml_singleton_search: bin length mismatch");

  std::vector<cplx> col(s.rows);
  std::uint32_t best_k = candidates.front();
  cplx best_a{0.0, 0.0};
  double best_score = -1.0;  // maximizing |s^H y|^2 / |s|^2 minimizes the residual
  for (const auto k : candidates) {
    s.column(k, col);
    cplx dot{0.0, 0.0};
    double n2 = 0.0;
    for (std::size_t p = 0; p < col.size(); ++p) {
      dot += std::conj(col[p]) * y[p];
      n2 += std::norm(col[p]);
    }
    const double score = n2 > 0.0 ? std::norm(dot) / n2 : 0.0;
    if (score > best_score) {
      best_score = score;
      best_k = k;
      best_a = n2 > 0.0 ? dot / n2 : cplx{0.0, 0.0};
    }
  }
  return {best_k, cfg.alphabet.quantize(best_a)};
}

std::vector<double> kay_weights(std::size_t q) {
  if (q < 2) throw std::invalid_argument("kay_weights: need at least two samples");
  const double qd = static_cast<double>(q);
  const double scale = 1.5 * qd / (qd * qd - 1.0);
  std::vector<double> w(q - 1);
  for (std::size_t m = 0; m + 1 < q; ++m) {
    const double t = (static_cast<double>(m) - (qd / 2.0 - 1.0)) / (qd / 2.0);
    w[m] = scale * (1.0 - t * t);
  }
  return w;
}

namespace {

// Weighted phase differences relative to a reference angle. Passing the
// phase of the diff resultant as reference keeps the sum meaningful when
// the true increment sits near the +-pi wrap.
std::optional<double> weighted_increment(std::span<const cplx> y, double reference) {
  const std::size_t q = y.size();
  const double qd = static_cast<double>(q);
  const double scale = 1.5 * qd / (qd * qd - 1.0);
  double acc = 0.0;
  for (std::size_t m = 0; m + 1 < q; ++m) {
    const cplx d = std::conj(y[m]) * y[m + 1];
    if (d == cplx{0.0, 0.0}) return std::nullopt;
    const double t = (static_cast<double>(m) - (qd / 2.0 - 1.0)) / (qd / 2.0);
    acc += scale * (1.0 - t * t) * wrap_pi(std::arg(d) - reference);
  }
  return acc;
}

std::optional<double> cluster_frequency(std::span<const cplx> y) {
  for (const auto& v : y)
    if (v == cplx{0.0, 0.0}) return std::nullopt;
  cplx resultant{0.0, 0.0};
  for (std::size_t m = 0; m + 1 < y.size(); ++m) resultant += std::conj(y[m]) * y[m + 1];
  const double coarse = std::abs(resultant) > 0.0 ? std::arg(resultant) : 0.0;
  const auto fine = weighted_increment(y, coarse);
  if (!fine) return std::nullopt;
  return wrap_2pi(coarse + *fine);
}

}  // namespace

std::optional<double> kay_phase_increment(std::span<const cplx> samples) {
  if (samples.size() < 2)
    throw std::invalid_argument("kay_phase_increment: need at least two samples");
  for (const auto& v : samples)
    if (v == cplx{0.0, 0.0}) return std::nullopt;
  return weighted_increment(samples, 0.0);
}

std::optional<double> kay_estimate(std::span<const cplx> samples) {
  const auto raw = kay_phase_increment(samples);
  if (!raw) return std::nullopt;
  return wrap_2pi(*raw);
}

double arc_total_measure(std::span<const Arc> arcs) {
  double total = 0.0;
  for (const auto& a : arcs) total += a.length;
  return total;
}

bool arc_contains(const Arc& a, double x) {
  if (x >= a.start && x < a.start + a.length) return true;
  // arcs may extend past 2 pi
  return x + kTwoPi >= a.start && x + kTwoPi < a.start + a.length;
}

std::vector<Arc> unwrap_region(double omega_hat, std::size_t level) {
  if (level > 20) throw std::invalid_argument("unwrap_region: level too large to materialize");
  const std::size_t count = std::size_t{1} << level;
  const double width = std::numbers::pi / static_cast<double>(count);
  const double base = wrap_2pi(omega_hat - std::numbers::pi / 2.0) / static_cast<double>(count);
  std::vector<Arc> arcs(count);
  for (std::size_t j = 0; j < count; ++j)
    arcs[j] = Arc{base + static_cast<double>(j) * (kTwoPi / static_cast<double>(count)), width};
  return arcs;
}

std::vector<Arc> intersect_unwrapped(std::span<const Arc> arcs, double omega_hat,
                                     std::size_t level) {
  if (level >= 63) throw std::invalid_argument("intersect_unwrapped: level out of range");
  const double denom = static_cast<double>(std::uint64_t{1} << level);
  const double period = kTwoPi / denom;
  const double width = std::numbers::pi / denom;
  const double base = wrap_2pi(omega_hat - std::numbers::pi / 2.0) / denom;

  std::vector<Arc> out;
  for (const auto& a : arcs) {
    const double lo = a.start;
    const double hi = a.start + a.length;
    const auto j_lo = static_cast<long long>(std::floor((lo - width - base) / period));
    const auto j_hi = static_cast<long long>(std::floor((hi - base) / period)) + 1;
    for (long long j = j_lo; j <= j_hi; ++j) {
      const double m_lo = base + static_cast<double>(j) * period;
      const double m_hi = m_lo + width;
      const double s = std::max(lo, m_lo);
      const double e = std::min(hi, m_hi);
      if (e - s > 1e-15) out.push_back(Arc{wrap_2pi(s), e - s});
    }
  }
  return out;
}

namespace {

long long grid_count(const Arc& a, std::size_t n) {
  const double g = kTwoPi / static_cast<double>(n);
  const auto first = static_cast<long long>(std::ceil(a.start / g));
  const auto last = static_cast<long long>(std::floor((a.start + a.length) / g));
  return last - first + 1;
}

void append_grid_indices(const Arc& a, std::size_t n, std::vector<std::uint32_t>& out) {
  const double g = kTwoPi / static_cast<double>(n);
  const auto first = static_cast<long long>(std::ceil(a.start / g));
  const auto last = static_cast<long long>(std::floor((a.start + a.length) / g));
  for (long long k = first; k <= last; ++k) {
    long long idx = k % static_cast<long long>(n);
    if (idx < 0) idx += static_cast<long long>(n);
    out.push_back(static_cast<std::uint32_t>(idx));
  }
}

}  // namespace

std::optional<std::pair<std::uint32_t, cplx>> dft_singleton_search(
    std::span<const cplx> y, const BinDetectionMatrix& s,
    std::span<const std::uint32_t> candidates, const DetectorConfig& cfg) {
  if (s.flavor != BinDetectionMatrix::Flavor::clustered_dft)
    throw std::invalid_argument("dft_singleton_search: needs the clustered flavor");
  if (y.size() != s.rows) throw std::invalid_argument("dft_singleton_search: bin length mismatch");
  if (candidates.empty()) return std::nullopt;

  const std::size_t q = s.per_cluster;
  std::vector<Arc> arcs{Arc{0.0, kTwoPi}};
  for (std::size_t c = 0; c < s.clusters; ++c) {
    const auto est = cluster_frequency(y.subspan(c * q, q));
    if (!est) return std::nullopt;
    arcs = intersect_unwrapped(arcs, *est, c);
    std::erase_if(arcs, [&](const Arc& a) { return grid_count(a, s.n) <= 0; });
    if (arcs.empty()) return std::nullopt;
    if (arcs.size() > 4) {
      std::sort(arcs.begin(), arcs.end(), [](const Arc& a, const Arc& b) {
        if (a.length != b.length) return a.length > b.length;
        return a.start < b.start;
      });
      arcs.resize(4);
    }
  }

  std::vector<std::uint32_t> grid;
  for (const auto& a : arcs) append_grid_indices(a, s.n, grid);
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

  std::vector<std::uint32_t> survivors;
  for (const auto k : grid)
    if (std::binary_search(candidates.begin(), candidates.end(), k)) survivors.push_back(k);
  if (survivors.empty()) return std::nullopt;

  double y2 = 0.0;
  for (const auto& v : y) y2 += std::norm(v);

  std::vector<cplx> col(s.rows);
  std::uint32_t best_k = survivors.front();
  cplx best_a{0.0, 0.0};
  double best_resid = 0.0;
  bool first = true;
  for (const auto k : survivors) {
    s.column(k, col);
    cplx dot{0.0, 0.0};
    double n2 = 0.0;
    for (std::size_t p = 0; p < col.size(); ++p) {
      dot += std::conj(col[p]) * y[p];
      n2 += std::norm(col[p]);
    }
    const double resid = n2 > 0.0 ? y2 - std::norm(dot) / n2 : y2;
    if (first || resid < best_resid) {
      first = false;
      best_resid = resid;
      best_k = k;
      best_a = n2 > 0.0 ? dot / n2 : cplx{0.0, 0.0};
    }
  }
  return std::make_pair(best_k, cfg.alphabet.quantize(best_a));
}

bool verify_singleton(std::span<const cplx> y, std::span<const cplx> s_k, cplx xhat,
                      const DetectorConfig& cfg) {
  if (y.size() != s_k.size()) throw std::invalid_argument("verify_singleton: length mismatch");
  double resid = 0.0;
  for (std::size_t p = 0; p < y.size(); ++p) resid += std::norm(y[p] - xhat * s_k[p]);
  resid /= static_cast<double>(y.size());
  return resid <= (1.0 + cfg.gamma) * cfg.sigma2 + cfg.energy_floor;
}

BinHypothesis robust_bin_detect(std::span<const cplx> y, const BinDetectionMatrix& s,
                                std::span<const std::uint32_t> candidates,
                                const DetectorConfig& cfg) {
  if (zero_ton_test(y, cfg)) return BinHypothesis::zero();
  if (candidates.empty()) return BinHypothesis::multi();

  std::uint32_t k = 0;
  cplx xhat{0.0, 0.0};
  if (cfg.flavor == SearchFlavor::ml) {
    std::tie(k, xhat) = ml_singleton_search(y, s, candidates, cfg);
  } else {
    const auto found = dft_singleton_search(y, s, candidates, cfg);
    if (!found) return BinHypothesis::multi();
    std::tie(k, xhat) = *found;
  }
  std::vector<cplx> col(s.rows);
  s.column(k, col);
  if (verify_singleton(y, col, xhat, cfg)) return BinHypothesis::single(k, xhat);
  return BinHypothesis::multi();
}

}  // namespace sgcs
