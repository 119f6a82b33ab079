#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace contourfit {

using Rng = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Independent stream seed for a (base, tag...) tuple.
inline std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> tags) {
  std::uint64_t h = 0x6a09e667f3bcc908ULL;
  for (auto t : tags) h = splitmix64(h ^ t);
  return base ^ h;
}

}  // namespace contourfit
