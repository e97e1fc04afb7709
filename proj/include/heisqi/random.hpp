#pragma once

#include <cstdint>

namespace heisqi {

// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Counter-based generator: the value at position i depends only on
/// (seed, stream, i). Parallel shards that own disjoint counter ranges
/// therefore reproduce a serial run exactly, and a shorter run is a prefix
/// of a longer one.
class CounterRng {
 public:
  constexpr CounterRng(std::uint64_t seed, std::uint64_t stream = 0) noexcept
      : key_(mix64(mix64(seed) ^ (stream * 0xd1b54a32d192ed03ULL + 0x632be59bd9b4e019ULL))) {}

  constexpr std::uint64_t bits(std::uint64_t counter) const noexcept {
    return mix64(key_ ^ mix64(counter));
  }

  /// Uniform double in [0, 1) with 53 random bits.
  constexpr double uniform(std::uint64_t counter) const noexcept {
    return static_cast<double>(bits(counter) >> 11) * 0x1.0p-53;
  }

  /// Uniform double in [lo, hi).
  constexpr double uniform(std::uint64_t counter, double lo, double hi) const noexcept {
    return lo + (hi - lo) * uniform(counter);
  }

 private:
  std::uint64_t key_;
};

/// Sequential view over a CounterRng.
class RngStream {
 public:
  constexpr RngStream(std::uint64_t seed, std::uint64_t stream = 0, std::uint64_t start = 0) noexcept
      : rng_(seed, stream), counter_(start) {}

  constexpr double uniform() noexcept { return rng_.uniform(counter_++); }
  constexpr double uniform(double lo, double hi) noexcept { return rng_.uniform(counter_++, lo, hi); }
  constexpr std::uint64_t bits() noexcept { return rng_.bits(counter_++); }
  constexpr std::uint64_t position() const noexcept { return counter_; }

 private:
  CounterRng rng_;
  std::uint64_t counter_;
};

}  // namespace heisqi
