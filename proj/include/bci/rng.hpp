#pragma once

#include <cstdint>
#include <random>

// Reproducibility contract: all randomness flows from a single 64-bit seed.
// Substreams are derived by splitmix64-mixing the seed with stream labels,
// and each substream drives an independent std::mt19937_64. The mapping
// (seed, labels) -> engine is fixed and is what test vectors depend on.
namespace bci {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t a,
                                    std::uint64_t b = 0) {
  return splitmix64(splitmix64(seed ^ splitmix64(a)) ^ splitmix64(~b));
}

inline std::mt19937_64 make_engine(std::uint64_t seed, std::uint64_t a,
                                   std::uint64_t b = 0) {
  return std::mt19937_64(substream_seed(seed, a, b));
}

}  // namespace bci
