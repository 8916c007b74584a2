#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>

namespace sgcs {

using Seed = std::uint64_t;
using cplx = std::complex<double>;

namespace detail {

inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

inline std::uint64_t rotl64(std::uint64_t x, int k) {
  return (x << k) | (x >> (64 - k));
}

}  // namespace detail

// Seed splitting: stream i of a base seed is mix64(base + GOLDEN*(2i+1)).
// Every module that needs several independent random streams from one
// configured seed goes through this, so a (seed, stream) pair names a
// reproducible stream regardless of evaluation order or threading.
inline Seed derive_seed(Seed base, std::uint64_t stream) {
  return detail::mix64(base + 0x9e3779b97f4a7c15ull * (2 * stream + 1));
}

// xoshiro256++ with splitmix64 state setup. Self-contained (no std
// distributions) so sampled values are identical across platforms and
// standard libraries for a given seed.
class Rng {
 public:
  explicit Rng(Seed seed) {
    std::uint64_t s = seed;
    for (auto& w : state_) {
      s += 0x9e3779b97f4a7c15ull;
      w = detail::mix64(s);
    }
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = detail::rotl64(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = detail::rotl64(state_[3], 45);
    return result;
  }

  // Unbiased integer in [0, bound); bound must be >= 1.
  std::uint64_t below(std::uint64_t bound) {
    const std::uint64_t threshold = (0 - bound) % bound;
    for (;;) {
      const std::uint64_t r = next_u64();
      if (r >= threshold) return r % bound;
    }
  }

  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }  // [0,1)

  double uniform(double a, double b) { return a + (b - a) * uniform(); }

  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u1 = 1.0 - uniform();  // (0,1], keeps log finite
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double t = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(t);
    have_spare_ = true;
    return r * std::cos(t);
  }

  // Circularly symmetric complex normal with total variance var.
  cplx cnormal(double var) {
    const double s = std::sqrt(var / 2.0);
    const double re = normal();
    const double im = normal();
    return {s * re, s * im};
  }

 private:
  std::uint64_t state_[4];
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace sgcs
