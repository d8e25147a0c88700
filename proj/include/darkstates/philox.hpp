#pragma once

// Philox4x32-10 counter-based generator (Salmon et al., SC'11). Every draw is a pure
// function of (key, counter), so streams can be addressed by site index and field tag
// without any shared sequential state.

#include <array>
#include <cmath>
#include <cstdint>

#include "darkstates/constants.hpp"

namespace darkstates {

class Philox4x32 {
 public:
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static constexpr Counter generate(Counter ctr, Key key) {
    for (int round = 0; round < 10; ++round) {
      if (round > 0) {
        key[0] += kWeylA;
        key[1] += kWeylB;
      }
      const std::uint64_t p0 = static_cast<std::uint64_t>(kMulA) * ctr[0];
      const std::uint64_t p1 = static_cast<std::uint64_t>(kMulB) * ctr[2];
      const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
      const auto lo0 = static_cast<std::uint32_t>(p0);
      const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
      const auto lo1 = static_cast<std::uint32_t>(p1);
      ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    }
    return ctr;
  }

 private:
  static constexpr std::uint32_t kMulA = 0xD2511F53;
  static constexpr std::uint32_t kMulB = 0xCD9E8D57;
  static constexpr std::uint32_t kWeylA = 0x9E3779B9;
  static constexpr std::uint32_t kWeylB = 0xBB67AE85;
};

/// SplitMix64 finalizer; a bijection on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x ^= x >> 30;
  x *= 0xBF58476D1CE4E5B9ULL;
  x ^= x >> 27;
  x *= 0x94D049BB133111EBULL;
  x ^= x >> 31;
  return x;
}

/// Stream tags separating independent random fields of one site.
enum class Field : std::uint32_t { energy = 1, orientation = 2, position = 3 };

/// Two uniform doubles in the open interval (0, 1) addressed by (seed, site, field, draw).
struct UniformPair {
  double first;
  double second;
};

inline UniformPair uniform_pair(std::uint64_t seed, std::uint64_t site, Field field,
                                std::uint32_t draw = 0) {
  const Philox4x32::Key key{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
  const Philox4x32::Counter ctr{static_cast<std::uint32_t>(site),
                                static_cast<std::uint32_t>(site >> 32),
                                static_cast<std::uint32_t>(field), draw};
  const auto out = Philox4x32::generate(ctr, key);
  const auto to_unit = [](std::uint32_t hi, std::uint32_t lo) {
    const std::uint64_t bits = (static_cast<std::uint64_t>(hi) << 32 | lo) >> 11;
    return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
  };
  return {to_unit(out[0], out[1]), to_unit(out[2], out[3])};
}

/// Standard normal deviate via Box-Muller on one addressed uniform pair.
inline double standard_normal(std::uint64_t seed, std::uint64_t site, Field field,
                              std::uint32_t draw = 0) {
  const auto u = uniform_pair(seed, site, field, draw);
  return std::sqrt(-2.0 * std::log(u.first)) * std::cos(2.0 * kPi * u.second);
}

}  // namespace darkstates
