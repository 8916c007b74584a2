#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <utility>
#include <vector>

#include "sgcs/detect_noiseless.hpp"
#include "sgcs/graph_codes.hpp"
#include "sgcs/measurement.hpp"
#include "sgcs/peeling.hpp"
#include "sgcs/rng.hpp"

namespace {

using sgcs::cplx;

sgcs::CodingMatrix coding_from_columns(std::size_t n_left, std::size_t n_right,
                                       const std::vector<std::pair<std::uint32_t,
                                                                   std::vector<std::uint32_t>>>&
                                           columns) {
  sgcs::CodingMatrix h;
  h.n_left = n_left;
  h.n_right = n_right;
  h.row_support.resize(n_right);
  h.col_support.resize(n_left);
  for (const auto& [k, bins] : columns) {
    h.col_support[k] = bins;
    for (const auto r : bins) h.row_support[r].push_back(k);
  }
  for (auto& row : h.row_support) std::sort(row.begin(), row.end());
  return h;
}

// Unit-scaling ratio-test matrix: rows (1, W^k).
sgcs::BinDetectionMatrix unit_ratio_S(std::size_t n) {
  sgcs::BinDetectionMatrix s;
  s.flavor = sgcs::BinDetectionMatrix::Flavor::noiseless_dft;
  s.n = n;
  s.rows = 2;
  s.scaling.assign(n, 1.0);
  return s;
}

sgcs::BinClassifier ratio_classifier(const sgcs::BinDetectionMatrix& s) {
  return [&s](std::size_t, std::span<const cplx> y) {
    return sgcs::classify_noiseless(y, s.scaling, s.n);
  };
}

// Peelability of the support set alone: repeatedly clear indices that are
// the only live one in some bin.
bool graph_peels(const sgcs::CodingMatrix& h, const std::vector<std::uint32_t>& supp) {
  std::vector<char> alive(h.n_left, 0);
  for (const auto k : supp) alive[k] = 1;
  std::size_t remaining = supp.size();
  bool progress = true;
  while (progress && remaining > 0) {
    progress = false;
    for (std::size_t r = 0; r < h.n_right; ++r) {
      std::uint32_t hits = 0, last = 0;
      for (const auto k : h.row_support[r])
        if (alive[k]) {
          ++hits;
          last = k;
        }
      if (hits == 1) {
        alive[last] = 0;
        --remaining;
        progress = true;
      }
    }
  }
  return remaining == 0;
}

double bin_distance(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

// The eight-bin worked instance used across the measurement tests.
struct WorkedInstance {
  sgcs::CodingMatrix h;
  sgcs::BinDetectionMatrix s;
  sgcs::SparseSignal x;
  sgcs::BinMeasurementSet bins;
};

WorkedInstance worked_instance() {
  WorkedInstance w;
  w.h = coding_from_columns(20, 8,
                            {{1, {1, 5}}, {3, {3, 7}}, {5, {1, 4}}, {10, {2, 4}}, {13, {1, 7}}});
  w.s = unit_ratio_S(20);
  w.x.n = 20;
  w.x.entries = {{1, cplx{1, 0}},
                 {3, cplx{4, 0}},
                 {5, cplx{2, 0}},
                 {10, cplx{3, 0}},
                 {13, cplx{7, 0}}};
  w.bins = sgcs::measure(w.x, w.h, w.s, 0.0, 2);
  return w;
}

}  // namespace

TEST_SUITE("peeling") {
  TEST_CASE("worked instance decodes in three scans with the expected trace") {
    const auto w = worked_instance();
    const auto report = sgcs::peel_decode(w.bins, w.h, w.s, ratio_classifier(w.s));

    CHECK(report.status == sgcs::DecodeReport::Status::decoded);
    CHECK(report.iterations == 3);
    CHECK(report.residual_bins.empty());

    REQUIRE(report.recovered.size() == 5);
    for (std::size_t i = 0; i < 5; ++i) {
      CHECK(report.recovered[i].first == w.x.entries[i].first);
      CHECK(std::abs(report.recovered[i].second - w.x.entries[i].second) < 1e-9);
    }

    // Scan 1 judges every bin; scan 2 only the three disturbed by the first
    // wave of subtractions; scan 3 sees the last bin drain to zero.
    using Kind = sgcs::BinHypothesis::Kind;
    REQUIRE(report.bin_trace.size() == 3);
    REQUIRE(report.bin_trace[0].size() == 8);
    const Kind first_scan[8] = {Kind::zero_ton,   Kind::multi_ton, Kind::single_ton,
                                Kind::single_ton, Kind::multi_ton, Kind::single_ton,
                                Kind::zero_ton,   Kind::multi_ton};
    for (std::size_t r = 0; r < 8; ++r) {
      CHECK(report.bin_trace[0][r].first == r);
      CHECK(report.bin_trace[0][r].second.kind == first_scan[r]);
    }
    CHECK(report.bin_trace[0][2].second.index == 10);
    CHECK(report.bin_trace[0][3].second.index == 3);
    CHECK(report.bin_trace[0][5].second.index == 1);

    REQUIRE(report.bin_trace[1].size() == 3);
    CHECK(report.bin_trace[1][0].first == 1);
    CHECK(report.bin_trace[1][0].second.kind == Kind::multi_ton);
    CHECK(report.bin_trace[1][1].first == 4);
    CHECK(report.bin_trace[1][1].second.kind == Kind::single_ton);
    CHECK(report.bin_trace[1][1].second.index == 5);
    CHECK(std::abs(report.bin_trace[1][1].second.value - cplx{2, 0}) < 1e-9);
    CHECK(report.bin_trace[1][2].first == 7);
    CHECK(report.bin_trace[1][2].second.kind == Kind::single_ton);
    CHECK(report.bin_trace[1][2].second.index == 13);

    REQUIRE(report.bin_trace[2].size() == 1);
    CHECK(report.bin_trace[2][0].first == 1);
    CHECK(report.bin_trace[2][0].second.kind == Kind::zero_ton);

    for (const auto& residual : report.final_residuals)
      for (const auto& v : residual) CHECK(std::abs(v) < 1e-9);
  }

  TEST_CASE("empty signals decode in one scan") {
    const auto h = sgcs::sample_regular(20, 6, 3, 3);
    const auto s = sgcs::build_noiseless_S(20, 4);
    sgcs::SparseSignal x;
    x.n = 20;
    const auto bins = sgcs::measure(x, h, s, 0.0, 5);
    const auto report = sgcs::peel_decode(bins, h, s, ratio_classifier(s));

    CHECK(report.status == sgcs::DecodeReport::Status::decoded);
    CHECK(report.iterations == 1);
    CHECK(report.recovered.empty());
    CHECK(report.residual_bins.empty());
    REQUIRE(report.bin_trace.size() == 1);
    CHECK(report.bin_trace[0].size() == 6);
    for (const auto& [r, hyp] : report.bin_trace[0])
      CHECK(hyp.kind == sgcs::BinHypothesis::Kind::zero_ton);
  }

  TEST_CASE("unpeelable cores stall and report the surviving bins") {
    // One leaf hangs off a 3-cycle of doubly-covered columns: after the leaf
    // peels, every remaining bin holds two live columns.
    const auto h = coding_from_columns(
        8, 4, {{1, {0, 1}}, {4, {2, 3}}, {5, {1, 2}}, {6, {1, 3}}});
    const auto s = unit_ratio_S(8);
    sgcs::SparseSignal x;
    x.n = 8;
    x.entries = {{1, cplx{1.5, 0}}, {4, cplx{-2, 0}}, {5, cplx{0.5, 0}}, {6, cplx{3, 0}}};
    const auto bins = sgcs::measure(x, h, s, 0.0, 7);
    const auto report = sgcs::peel_decode(bins, h, s, ratio_classifier(s));

    CHECK(report.status == sgcs::DecodeReport::Status::stalled);
    CHECK(report.iterations == 2);
    REQUIRE(report.recovered.size() == 1);
    CHECK(report.recovered[0].first == 1);
    CHECK(std::abs(report.recovered[0].second - cplx{1.5, 0}) < 1e-9);
    CHECK(report.residual_bins == std::vector<std::size_t>{1, 2, 3});

    // Untouched bins keep their original observations; the peeled column is
    // subtracted exactly once from its other bin.
    std::vector<cplx> col(2);
    s.column(1, col);
    auto expected1 = bins.bins[1];
    for (std::size_t p = 0; p < 2; ++p) expected1[p] -= cplx{1.5, 0} * col[p];
    CHECK(bin_distance(report.final_residuals[1], expected1) < 1e-12);
    CHECK(bin_distance(report.final_residuals[2], bins.bins[2]) < 1e-12);
    CHECK(bin_distance(report.final_residuals[3], bins.bins[3]) < 1e-12);
  }

  TEST_CASE("duplicate discoveries: the first wins and consistent copies drain") {
    const auto h = coding_from_columns(8, 2, {{1, {0, 1}}});
    const auto s = unit_ratio_S(8);
    sgcs::SparseSignal x;
    x.n = 8;
    x.entries = {{1, cplx{2.5, 0}}};
    const auto bins = sgcs::measure(x, h, s, 0.0, 9);
    const auto report = sgcs::peel_decode(bins, h, s, ratio_classifier(s));

    CHECK(report.status == sgcs::DecodeReport::Status::decoded);
    CHECK(report.iterations == 2);
    REQUIRE(report.recovered.size() == 1);
    CHECK(report.recovered[0].first == 1);
    REQUIRE(report.bin_trace.size() == 2);
    REQUIRE(report.bin_trace[1].size() == 1);
    CHECK(report.bin_trace[1][0].first == 1);
    CHECK(report.bin_trace[1][0].second.kind == sgcs::BinHypothesis::Kind::zero_ton);
  }

  TEST_CASE("conflicting duplicate values demote the disagreeing bin") {
    const auto h = coding_from_columns(8, 2, {{5, {0, 1}}});
    const auto s = unit_ratio_S(8);
    sgcs::SparseSignal x;
    x.n = 8;
    x.entries = {{5, cplx{1, 0}}};
    const auto bins = sgcs::measure(x, h, s, 0.0, 11);

    // Bin 1 insists on a different value for the same column.
    const sgcs::BinClassifier liar = [](std::size_t r, std::span<const cplx>) {
      return r == 0 ? sgcs::BinHypothesis::single(5, cplx{1, 0})
                    : sgcs::BinHypothesis::single(5, cplx{2, 0});
    };
    const auto report = sgcs::peel_decode(bins, h, s, liar);

    CHECK(report.status == sgcs::DecodeReport::Status::stalled);
    CHECK(report.iterations == 2);
    REQUIRE(report.recovered.size() == 1);
    CHECK(report.recovered[0].first == 5);
    CHECK(std::abs(report.recovered[0].second - cplx{1, 0}) < 1e-12);
    CHECK(report.residual_bins == std::vector<std::size_t>{1});
  }

  TEST_CASE("recovered values and leftover residuals account for every bin") {
    for (int rep = 0; rep < 40; ++rep) {
      sgcs::Rng rng(5000 + rep);
      const std::size_t n = 64, r = 12;
      const std::size_t d = 2 + rep % 2;
      const std::size_t k = 2 + rng.below(7);
      const auto h = sgcs::sample_regular(n, r, d, 6000 + rep);
      const auto s = sgcs::build_noiseless_S(n, 6100 + rep);

      sgcs::SparseSignal x;
      x.n = n;
      std::vector<std::uint32_t> supp;
      while (supp.size() < k) {
        const auto idx = std::uint32_t(rng.below(n));
        if (std::find(supp.begin(), supp.end(), idx) == supp.end()) supp.push_back(idx);
      }
      std::sort(supp.begin(), supp.end());
      for (const auto idx : supp)
        x.entries.emplace_back(idx, rng.below(2) == 0 ? cplx{1, 0} : cplx{-1, 0});

      const auto bins = sgcs::measure(x, h, s, 0.0, 6200 + rep);
      const auto report = sgcs::peel_decode(bins, h, s, ratio_classifier(s));

      // Everything recovered is a true entry with the true value.
      for (const auto& [idx, val] : report.recovered) {
        const auto it = std::lower_bound(
            x.entries.begin(), x.entries.end(), idx,
            [](const std::pair<std::uint32_t, cplx>& e, std::uint32_t key) {
              return e.first < key;
            });
        REQUIRE(it != x.entries.end());
        REQUIRE(it->first == idx);
        CHECK(std::abs(it->second - val) < 1e-9);
      }

      if (report.status == sgcs::DecodeReport::Status::decoded) {
        CHECK(report.recovered.size() == x.entries.size());
        for (const auto& residual : report.final_residuals)
          for (const auto& v : residual) CHECK(std::abs(v) < 1e-9);
      } else {
        CHECK_FALSE(report.residual_bins.empty());
        // Never-resolved bins carry exactly the original observation minus
        // every committed column they host.
        std::vector<cplx> col(s.rows);
        for (const auto rb : report.residual_bins) {
          auto expect = bins.bins[rb];
          for (const auto& [idx, val] : report.recovered) {
            const auto& home = h.col_support[idx];
            if (!std::binary_search(home.begin(), home.end(), std::uint32_t(rb))) continue;
            s.column(idx, col);
            for (std::size_t p = 0; p < col.size(); ++p) expect[p] -= val * col[p];
          }
          CHECK(bin_distance(report.final_residuals[rb], expect) < 1e-9);
        }
      }
    }
  }

  TEST_CASE("decoding matches pure graph peeling on exhaustive small supports") {
    for (int gseed = 0; gseed < 20; ++gseed) {
      const std::size_t n = 10, r = 5;
      const auto h = sgcs::sample_regular(n, r, 2, 7000 + gseed);
      const auto s = sgcs::build_noiseless_S(n, 7100 + gseed);

      std::vector<std::vector<std::uint32_t>> supports;
      for (std::uint32_t a = 0; a < n; ++a) {
        supports.push_back({a});
        for (std::uint32_t b = a + 1; b < n; ++b) supports.push_back({a, b});
      }

      for (const auto& supp : supports) {
        sgcs::SparseSignal x;
        x.n = n;
        for (const auto idx : supp)
          x.entries.emplace_back(idx, (idx + gseed) % 2 == 0 ? cplx{1, 0} : cplx{-1, 0});
        const auto bins = sgcs::measure(x, h, s, 0.0, 7200 + gseed);
        const auto report = sgcs::peel_decode(bins, h, s, ratio_classifier(s));

        const bool decoded = report.status == sgcs::DecodeReport::Status::decoded;
        CHECK(decoded == graph_peels(h, supp));
        if (decoded) {
          REQUIRE(report.recovered.size() == supp.size());
          for (std::size_t i = 0; i < supp.size(); ++i) {
            CHECK(report.recovered[i].first == supp[i]);
            CHECK(std::abs(report.recovered[i].second - x.entries[i].second) < 1e-9);
          }
        }
      }
    }
  }

  TEST_CASE("scan budgets cap the work") {
    const auto w = worked_instance();
    const auto report = sgcs::peel_decode(w.bins, w.h, w.s, ratio_classifier(w.s), 1);

    CHECK(report.iterations == 1);
    CHECK(report.status == sgcs::DecodeReport::Status::stalled);
    CHECK(report.recovered.size() == 3);
    CHECK(report.residual_bins == std::vector<std::size_t>{1, 4, 7});
  }

  TEST_CASE("malformed inputs are rejected") {
    const auto w = worked_instance();
    const auto classify = ratio_classifier(w.s);

    auto short_bins = w.bins;
    short_bins.bins.pop_back();
    CHECK_THROWS_AS((void)sgcs::peel_decode(short_bins, w.h, w.s, classify),
                    std::invalid_argument);

    const auto narrow = unit_ratio_S(8);
    CHECK_THROWS_AS((void)sgcs::peel_decode(w.bins, w.h, narrow, classify),
                    std::invalid_argument);

    auto tall = w.bins;
    tall.rows_per_bin = 3;
    CHECK_THROWS_AS((void)sgcs::peel_decode(tall, w.h, w.s, classify), std::invalid_argument);

    auto ragged = w.bins;
    ragged.bins[2].pop_back();
    CHECK_THROWS_AS((void)sgcs::peel_decode(ragged, w.h, w.s, classify), std::invalid_argument);
  }
}
