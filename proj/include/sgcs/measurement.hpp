#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "sgcs/graph_codes.hpp"
#include "sgcs/rng.hpp"

namespace sgcs {

// K-sparse length-n signal; entries sorted by index, values nonzero.
struct SparseSignal {
  std::size_t n = 0;
  std::vector<std::pair<std::uint32_t, cplx>> entries;

  std::vector<std::uint32_t> support() const;
  double energy() const;  // squared l2 norm
};

// Polar value grid { (a_min + l1*rho_step) * exp(i 2 pi l2 / phase_count) }.
// The default is the two-point set {+1, -1}.
struct Alphabet {
  double a_min = 1.0;
  double rho_step = 1.0;
  std::size_t magnitude_count = 1;  // L1
  std::size_t phase_count = 2;      // L2

  std::size_t size() const { return magnitude_count * phase_count; }
  cplx member(std::size_t i1, std::size_t i2) const;
  cplx quantize(cplx z) const;  // nearest member in Euclidean distance
};

// Per-bin detection matrix (P rows, n columns), stored by flavor:
//  - noiseless_dft: rows (G_k, G_k W^k) with W = exp(i 2 pi / n); only the
//    scaling vector G is stored.
//  - random_subgaussian: dense i.i.d. complex Gaussian entries, kept
//    column-major so s_k is contiguous.
//  - clustered_dft: row (c, q) of column k is W^(k (start_rows[c] + q 2^c));
//    requires odd n so the dyadic offsets stay invertible mod n.
struct BinDetectionMatrix {
  enum class Flavor { noiseless_dft, random_subgaussian, clustered_dft };

  Flavor flavor = Flavor::noiseless_dft;
  std::size_t n = 0;
  std::size_t rows = 0;  // P
  std::vector<double> scaling;
  std::vector<cplx> entries;                // column-major, random flavor only
  std::size_t clusters = 0;                 // C
  std::size_t per_cluster = 0;              // Q
  std::vector<std::uint32_t> start_rows;    // l_c, one per cluster

  void column(std::uint32_t k, std::span<cplx> out) const;  // writes P rows of s_k
};

// Bin observations y_r = S diag(h_r) x + w_r, one length-P vector per bin.
struct BinMeasurementSet {
  std::vector<std::vector<cplx>> bins;
  std::size_t rows_per_bin = 0;
  double sigma2 = 0.0;
};

// Ratio-test flavor: P = 2, scalings G_k drawn uniform from [1, 2].
BinDetectionMatrix build_noiseless_S(std::size_t n, Seed seed);

// Dense i.i.d. circularly-symmetric complex Gaussian, unit total variance.
BinDetectionMatrix build_random_S(std::size_t n, std::size_t p, Seed seed);

// C clusters of Q rows at dyadic spacings; start rows drawn uniformly.
BinDetectionMatrix build_clustered_S(std::size_t n, std::size_t c, std::size_t q, Seed seed);

// Dense (R*P) x n row-tensor product: block r, row p, column k equals
// H[r,k] * S[p,k]. Test utility; refuses n beyond the cap.
std::vector<std::vector<cplx>> row_tensor(const CodingMatrix& h, const BinDetectionMatrix& s,
                                          std::size_t cap = 4096);

// Per-bin measurement; touches only columns in supp(x), then adds complex
// Gaussian noise of total variance sigma2 per sample from a per-bin stream.
BinMeasurementSet measure(const SparseSignal& x, const CodingMatrix& h,
                          const BinDetectionMatrix& s, double sigma2, Seed seed);

}  // namespace sgcs
