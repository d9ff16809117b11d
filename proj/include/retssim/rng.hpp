#pragma once

#include <cstdint>
#include <random>

namespace retssim {

using Engine = std::mt19937_64;

// SplitMix64 finalizer: a bijective 64-bit mix with full avalanche, used to
// turn (master seed, stream index) pairs into well-separated engine seeds.
constexpr std::uint64_t splitmix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  return splitmix64(master + (index + 1) * 0x9e3779b97f4a7c15ULL);
}

inline Engine make_engine(std::uint64_t master, std::uint64_t index) {
  return Engine(derive_seed(master, index));
}

}  // namespace retssim
