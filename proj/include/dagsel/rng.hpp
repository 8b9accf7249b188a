#pragma once

// Portable, seedable random streams.
//
// The generator is xoshiro256** (Blackman & Vigna) seeded by expanding a
// 64-bit seed through SplitMix64. Both are fully specified integer algorithms,
// so streams are bit-identical across compilers and platforms. None of the
// <random> distributions are used because their output is
// implementation-defined.
//
// Sub-stream rule: derive_seed(base, a, b) folds each key into the state with
// one SplitMix64 finalization step,
//   h = mix(base); h = mix(h ^ (a + C)); h = mix(h ^ (b + C))
// with C = 0x9E3779B97F4A7C15. Keys are independent of execution order.

#include <cstdint>
#include <limits>

namespace dagsel {

__extension__ using uint128 = unsigned __int128;

constexpr std::uint64_t splitmix64_mix(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

class SplitMix64 {
 public:
  explicit constexpr SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

  constexpr std::uint64_t next() noexcept {
    state_ += 0x9E3779B97F4A7C15ULL;
    return splitmix64_mix(state_);
  }

 private:
  std::uint64_t state_;
};

constexpr std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a,
                                    std::uint64_t b) noexcept {
  constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
  std::uint64_t h = splitmix64_mix(base);
  h = splitmix64_mix(h ^ (a + kGolden));
  h = splitmix64_mix(h ^ (b + kGolden));
  return h;
}

/// xoshiro256**. Satisfies UniformRandomBitGenerator.
class Xoshiro256 {
 public:
  using result_type = std::uint64_t;

  explicit constexpr Xoshiro256(std::uint64_t seed) noexcept : s_{} {
    SplitMix64 sm(seed);
    for (auto& word : s_) word = sm.next();
  }

  /// Raw state, for reproducing published reference streams.
  static constexpr Xoshiro256 from_state(std::uint64_t s0, std::uint64_t s1,
                                         std::uint64_t s2,
                                         std::uint64_t s3) noexcept {
    Xoshiro256 g(0);
    g.s_[0] = s0;
    g.s_[1] = s1;
    g.s_[2] = s2;
    g.s_[3] = s3;
    return g;
  }

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept {
    return std::numeric_limits<result_type>::max();
  }

  constexpr result_type operator()() noexcept {
    const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  /// Uniform double in [0, 1) from the top 53 bits.
  constexpr double uniform01() noexcept {
    return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
  }

  /// Uniform integer in [0, bound) by Lemire's multiply-shift with rejection.
  std::uint64_t below(std::uint64_t bound) noexcept {
    if (bound <= 1) return 0;
    uint128 product =
        static_cast<uint128>((*this)()) * bound;
    auto low = static_cast<std::uint64_t>(product);
    if (low < bound) {
      const std::uint64_t threshold = (0 - bound) % bound;
      while (low < threshold) {
        product = static_cast<uint128>((*this)()) * bound;
        low = static_cast<std::uint64_t>(product);
      }
    }
    return static_cast<std::uint64_t>(product >> 64);
  }

 private:
  static constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept {
    return (x << k) | (x >> (64 - k));
  }

  std::uint64_t s_[4];
};

}  // namespace dagsel
