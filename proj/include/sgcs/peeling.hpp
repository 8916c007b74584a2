#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "sgcs/detect_noiseless.hpp"
#include "sgcs/graph_codes.hpp"
#include "sgcs/measurement.hpp"

namespace sgcs {

// Judges one bin's current residual. The decoder owns the residuals; the bin
// index lets implementations look up per-bin candidate sets.
using BinClassifier = std::function<BinHypothesis(std::size_t, std::span<const cplx>)>;

struct DecodeReport {
  enum class Status { decoded, stalled };

  std::vector<std::pair<std::uint32_t, cplx>> recovered;  // sorted by index
  std::size_t iterations = 0;                             // scans executed
  Status status = Status::stalled;
  std::vector<std::size_t> residual_bins;  // unresolved bins not judged empty at exit
  // One entry per scan: the bins actually reclassified in that scan, in bin
  // order, with the hypothesis each produced. Scan 1 covers every bin.
  std::vector<std::vector<std::pair<std::size_t, BinHypothesis>>> bin_trace;
  std::vector<std::vector<cplx>> final_residuals;  // all bins, post-subtraction
};

// Synchronous peeling. Each scan classifies bins on the residuals as they
// stood at scan start, then commits every discovered single-ton at once:
// the value is subtracted from all bins carrying that column, the source
// bin included, before the source is retired. Retired bins keep their
// residuals untouched afterward. The first recovery of an index wins;
// a same-scan duplicate with a matching value is skipped (its bin empties
// next scan), a mismatched value demotes that bin to multi-ton. max_scans
// of zero means 2 * bins + 16.
DecodeReport peel_decode(const BinMeasurementSet& bins, const CodingMatrix& h,
                         const BinDetectionMatrix& s, const BinClassifier& classify,
                         std::size_t max_scans = 0);

}  // namespace sgcs
