#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace ucn {

// splitmix64; used to derive independent seed streams from one base seed.
inline uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline uint64_t mix_seed(uint64_t seed) { return splitmix64(seed); }

template <class... Rest>
uint64_t mix_seed(uint64_t seed, uint64_t tag, Rest... rest) {
  return mix_seed(splitmix64(seed ^ splitmix64(tag)), rest...);
}

// Stable tag for a named stream ("users", "noise", ...).
constexpr uint64_t stream_tag(std::string_view name) {
  uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
  for (char c : name) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::mt19937_64 make_rng(uint64_t seed) { return std::mt19937_64(seed); }

}  // namespace ucn
