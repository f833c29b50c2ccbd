#pragma once

#include <cstdint>
#include <random>

namespace fwus {

using Rng = std::mt19937_64;

// splitmix64 finalizer; used to derive independent sub-streams from a master
// seed (run i of a Monte Carlo batch uses master ^ mix(i)).
constexpr std::uint64_t mix_seed(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t sub_seed(std::uint64_t master, std::uint64_t index) noexcept {
  return master ^ mix_seed(index);
}

// Uniform in [0, 1); std::generate_canonical is not bit-portable across
// standard libraries, this is.
inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline bool bernoulli(Rng& rng, double p) { return uniform01(rng) < p; }

}  // namespace fwus
