#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <utility>

namespace deql {

// SplitMix64 finaliser; a bijective mixer on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Counter-based stream: a pure function of (seed, a, b, c).
constexpr std::uint64_t counter_hash(std::uint64_t seed, std::uint64_t a, std::uint64_t b,
                                     std::uint64_t c) {
  return mix64(mix64(mix64(mix64(seed) ^ a) ^ b) ^ c);
}

// Uniform double in [0, 1) from the top 53 bits.
constexpr double to_unit(std::uint64_t x) { return static_cast<double>(x >> 11) * 0x1.0p-53; }

// Uniform integer in [0, bound) using rejection; platform independent, unlike
// std::uniform_int_distribution.
inline std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t bound) {
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return x % bound;
}

// Fisher-Yates with uniform_below, so the permutation depends only on the seed.
template <class T>
void seeded_shuffle(std::span<T> values, std::mt19937_64& rng) {
  for (std::size_t k = values.size(); k > 1; --k) {
    auto j = static_cast<std::size_t>(uniform_below(rng, k));
    std::swap(values[k - 1], values[j]);
  }
}

}  // namespace deql
