#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace papermatch {

// splitmix64; used to fan a single top-level seed out into independent named
// streams so adding one consumer does not perturb the others.
inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t seed, std::string_view label) {
  std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a over the label
  for (char c : label) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return mix64(seed ^ h);
}

inline std::uint64_t derive_seed(std::uint64_t seed, std::string_view label,
                                 std::uint64_t a, std::uint64_t b = 0) {
  return mix64(derive_seed(seed, label) ^ mix64(a ^ mix64(b)));
}

using RandomEngine = std::mt19937_64;

}  // namespace papermatch
