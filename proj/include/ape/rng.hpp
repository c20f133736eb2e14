#pragma once

#include <cstdint>
#include <random>
#include <utility>
#include <vector>

namespace ape {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Independent stream for worker `stream` derived from a user seed.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  return splitmix64(splitmix64(seed) ^ (stream * 0xD1B54A32D192ED03ULL));
}

// Uniform integer in [0, n); n > 0. Plain modulo keeps results identical
// across standard libraries, unlike std::uniform_int_distribution.
inline std::uint64_t uniform_below(std::mt19937_64 &rng, std::uint64_t n) { return rng() % n; }

inline double uniform01(std::mt19937_64 &rng) {
  return static_cast<double>(rng() >> 11) * (1.0 / 9007199254740992.0);
}

template <typename T>
void shuffle_in_place(std::vector<T> &v, std::mt19937_64 &rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    std::swap(v[i - 1], v[uniform_below(rng, i)]);
  }
}

}  // namespace ape
