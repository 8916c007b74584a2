#include "sgcs/peeling.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sgcs {

namespace {

bool values_agree(cplx a, cplx b) {
  return std::abs(a - b) <= 1e-6 * std::max(1.0, std::abs(a));
}

}  // namespace

DecodeReport peel_decode(const BinMeasurementSet& bins, const CodingMatrix& h,
                         const BinDetectionMatrix& s, const BinClassifier& classify,
                         std::size_t max_scans) {
  const std::size_t n_bins = h.n_right;
  if (bins.bins.size() != n_bins) throw std::invalid_argument("peel_decode: bin count mismatch");
  if (s.n != h.n_left) throw std::invalid_argument("peel_decode: column count mismatch");
  if (s.rows != bins.rows_per_bin) throw std::invalid_argument("peel_decode: row count mismatch");
  for (const auto& b : bins.bins)
    if (b.size() != bins.rows_per_bin) throw std::invalid_argument("peel_decode: ragged bins");
  if (max_scans == 0) max_scans = 2 * n_bins + 16;

  DecodeReport report;
  std::vector<std::vector<cplx>> residual = bins.bins;
  std::vector<bool> resolved(n_bins, false);
  std::vector<bool> dirty(n_bins, true);
  std::vector<BinHypothesis> cached(n_bins);
  std::vector<std::pair<std::uint32_t, cplx>> recovered;  // kept sorted by index
  std::vector<cplx> col(s.rows);

  for (std::size_t scan = 0; scan < max_scans; ++scan) {
    ++report.iterations;
    std::vector<std::pair<std::size_t, BinHypothesis>> trace;
    for (std::size_t r = 0; r < n_bins; ++r) {
      if (resolved[r] || !dirty[r]) continue;
      cached[r] = classify(r, residual[r]);
      dirty[r] = false;
      trace.emplace_back(r, cached[r]);
    }
    report.bin_trace.push_back(std::move(trace));

    bool progress = false;
    for (std::size_t r = 0; r < n_bins; ++r) {
      if (resolved[r] || cached[r].kind != BinHypothesis::Kind::single_ton) continue;
      const std::uint32_t k = cached[r].index;
      const cplx v = cached[r].value;
      auto it = std::lower_bound(
          recovered.begin(), recovered.end(), k,
          [](const std::pair<std::uint32_t, cplx>& e, std::uint32_t key) { return e.first < key; });
      if (it != recovered.end() && it->first == k) {
        // First recovery wins. A consistent duplicate empties once the
        // winner's subtraction lands; a mismatch means the bin lied.
        if (!values_agree(it->second, v)) cached[r] = BinHypothesis::multi();
        continue;
      }
      recovered.insert(it, {k, v});
      progress = true;
      s.column(k, col);
      for (const auto rb : h.col_support[k]) {
        if (resolved[rb]) continue;
        for (std::size_t p = 0; p < col.size(); ++p) residual[rb][p] -= v * col[p];
        if (rb != r) dirty[rb] = true;
      }
      resolved[r] = true;
    }
    if (!progress) break;
  }

  for (std::size_t r = 0; r < n_bins; ++r) {
    if (resolved[r]) continue;
    if (dirty[r]) {
      cached[r] = classify(r, residual[r]);
      dirty[r] = false;
    }
    if (cached[r].kind != BinHypothesis::Kind::zero_ton) report.residual_bins.push_back(r);
  }
  report.status =
      report.residual_bins.empty() ? DecodeReport::Status::decoded : DecodeReport::Status::stalled;
  report.recovered = std::move(recovered);
  report.final_residuals = std::move(residual);
  return report;
}

}  // namespace sgcs
