#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>

namespace rumor {

/// Purposes tag independent streams derived from one master seed.
enum class StreamPurpose : std::uint64_t {
  GraphSample = 1,
  StartVertex = 2,
  Protocol = 3,   // offset by protocol index
  Lists = 16,     // offset by protocol index
  Permutation = 32,
  PermutationChoice = 33,
};

inline constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Seed for stream `index` of `purpose` under `master`. Pure function of its
/// arguments, so runs can be executed in any order or on any thread.
inline constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t purpose,
                                           std::uint64_t index) noexcept {
  std::uint64_t h = splitmix64(master);
  h = splitmix64(h ^ (purpose * 0xd6e8feb86659fd93ULL));
  h = splitmix64(h ^ (index * 0xa0761d6478bd642fULL));
  return h;
}

inline constexpr std::uint64_t derive_seed(std::uint64_t master, StreamPurpose purpose,
                                           std::uint64_t index) noexcept {
  return derive_seed(master, static_cast<std::uint64_t>(purpose), index);
}

/// xoshiro256++ stream seeded through splitmix64. Satisfies
/// UniformRandomBitGenerator so it also plugs into <random> distributions.
class RandomSource {
public:
  using result_type = std::uint64_t;

  explicit RandomSource(std::uint64_t seed = 0) noexcept { reseed(seed); }

  static RandomSource derived(std::uint64_t master, StreamPurpose purpose,
                              std::uint64_t index) noexcept {
    return RandomSource(derive_seed(master, purpose, index));
  }

  void reseed(std::uint64_t seed) noexcept {
    std::uint64_t x = seed;
    for (auto& word : state_) {
      x += 0x9e3779b97f4a7c15ULL;
      std::uint64_t z = x;
      z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
      z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
      word = z ^ (z >> 31);
    }
  }

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept { return next(); }

  result_type next() noexcept {
    const std::uint64_t result = std::rotl(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = std::rotl(state_[3], 45);
    return result;
  }

  /// Uniform integer in [0, bound). bound must be positive.
  std::uint64_t uniform_index(std::uint64_t bound) noexcept {
    // Lemire's multiply-shift with rejection.
    std::uint64_t x = next();
    __uint128_t m = static_cast<__uint128_t>(x) * bound;
    auto low = static_cast<std::uint64_t>(m);
    if (low < bound) {
      const std::uint64_t threshold = (0 - bound) % bound;
      while (low < threshold) {
        x = next();
        m = static_cast<__uint128_t>(x) * bound;
        low = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform01() noexcept { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  bool bernoulli(double p) noexcept { return uniform01() < p; }

  /// Exp(1) by inverse transform, -ln(1 - U).
  double exponential() noexcept { return -std::log(1.0 - uniform01()); }

private:
  std::uint64_t state_[4]{};
};

}  // namespace rumor
