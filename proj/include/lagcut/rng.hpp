#pragma once

// Seeded, platform-independent random numbers.
//
// Everything is built on SplitMix64 so that a (seed, stream) pair yields the
// same sequence on every compiler and standard library. Distributions from
// <random> are avoided on purpose: their output is implementation-defined.
//
// Stream splitting: the stream for a key tuple (k0, k1, ...) is obtained by
// folding each key into the seed with one SplitMix64 finalisation step,
//   state = mix(state ^ (key + golden * (position + 1))).
// Heuristic random cuts use the keys (call index, article index).

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <limits>

namespace lagcut {

inline constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

constexpr std::uint64_t splitmix_finalize(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

class SplitMix64 {
 public:
  using result_type = std::uint64_t;

  constexpr explicit SplitMix64(std::uint64_t seed = 0) noexcept : state_(seed) {}

  /// Generator for an independent stream keyed by `keys` under `seed`.
  static constexpr SplitMix64 stream(std::uint64_t seed,
                                     std::initializer_list<std::uint64_t> keys) noexcept {
    std::uint64_t s = splitmix_finalize(seed + kGolden);
    std::uint64_t pos = 1;
    for (auto k : keys) {
      s = splitmix_finalize(s ^ (k + kGolden * pos));
      ++pos;
    }
    return SplitMix64(s);
  }

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  constexpr result_type operator()() noexcept {
    state_ += kGolden;
    return splitmix_finalize(state_);
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }

  /// Unbiased integer in [0, bound) (Lemire's multiply-and-reject).
  std::uint64_t below(std::uint64_t bound) noexcept {
    if (bound <= 1) return 0;
    unsigned __int128 m = static_cast<unsigned __int128>((*this)()) * bound;
    auto low = static_cast<std::uint64_t>(m);
    if (low < bound) {
      const std::uint64_t threshold = (0 - bound) % bound;
      while (low < threshold) {
        m = static_cast<unsigned __int128>((*this)()) * bound;
        low = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

  constexpr std::uint64_t state() const noexcept { return state_; }

 private:
  std::uint64_t state_;
};

/// Position of a caller inside a reproducible random sequence: the run seed
/// plus a counter of completed draws-calls.
struct RngState {
  std::uint64_t seed = 0;
  std::uint64_t calls = 0;
};

}  // namespace lagcut
