#pragma once

#include <cstdint>

namespace sls {

// SplitMix64 (Steele, Lea & Flood 2014). Every random draw in the project
// goes through these functions so that results can be reproduced bit for bit
// from any language.
inline constexpr std::uint64_t kSplitMixGamma = 0x9E3779B97F4A7C15ULL;

inline constexpr std::uint64_t SplitMix64Finalize(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Output number `index` (0-based) of the SplitMix64 stream started at seed.
inline constexpr std::uint64_t SplitMix64At(std::uint64_t seed, std::uint64_t index) {
  return SplitMix64Finalize(seed + (index + 1) * kSplitMixGamma);
}

// Top 53 bits as a double in [0, 1).
inline constexpr double ToUnitInterval(std::uint64_t bits) {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

// Sequential generator over the same stream.
class SplitMix64 {
 public:
  explicit constexpr SplitMix64(std::uint64_t seed) : seed_(seed) {}

  constexpr std::uint64_t Next() { return SplitMix64At(seed_, index_++); }
  constexpr double NextUnit() { return ToUnitInterval(Next()); }
  // Uniform in [0, bound) for bound > 0, by rejection.
  constexpr std::uint64_t NextBelow(std::uint64_t bound) {
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound);
    std::uint64_t x = Next();
    while (x >= limit) x = Next();
    return x % bound;
  }

 private:
  std::uint64_t seed_;
  std::uint64_t index_ = 0;
};

}  // namespace sls
