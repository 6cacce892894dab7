#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <random>

namespace gallop {

// splitmix64 finalizer
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t hash_words(std::initializer_list<std::uint64_t> words) {
  std::uint64_t h = 0x243f6a8885a308d3ULL;
  for (auto w : words) h = mix64(h ^ w);
  return h;
}

// Uniform on the open interval (0, 1).
inline double unit_open(std::uint64_t h) {
  return (static_cast<double>(h >> 11) + 0.5) * (1.0 / 9007199254740992.0);
}

inline double exponential_from_hash(std::uint64_t h, double mean = 1.0) {
  return -mean * std::log(unit_open(h));
}

using Rng = std::mt19937_64;

// Child seeds for replications and sub-streams.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream, std::uint64_t index = 0) {
  return hash_words({master, stream, index});
}

}  // namespace gallop
