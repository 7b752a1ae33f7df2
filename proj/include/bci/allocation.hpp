#pragma once

#include <cstdint>
#include <vector>

#include "bci/rng.hpp"

namespace bci {

// Counterfactual allocation program: each unit in an interference set is
// treated independently with probability alpha. Under independence the
// conditional law pi(s | A_i = a; alpha) does not depend on a.
struct AllocationStrategy {
  double alpha = 0.5;
};

using AllocationVector = std::vector<std::uint8_t>;

inline constexpr int kDefaultEnumerationCap = 20;

// Probability of allocation s under the Bernoulli program.
double pi_conditional(const AllocationVector& s, const AllocationStrategy& strategy);

// Same, with s encoded as an integer (bit b = coordinate b) of width n.
// Used by enumeration-heavy callers to avoid materializing vectors.
double pi_of_code(std::uint64_t code, int n, const AllocationStrategy& strategy);

// All 2^n allocation vectors in lexicographic order by bit index (index 0 is
// the least significant). Throws std::invalid_argument beyond the cap.
std::vector<AllocationVector> enumerate_allocations(int n,
                                                    int cap = kDefaultEnumerationCap);

// R independent draws, bit b of draw r ~ Bernoulli(alpha). Deterministic
// given (n, strategy, count, seed); draw r uses substream (seed, r).
std::vector<AllocationVector> sample_allocations(int n,
                                                 const AllocationStrategy& strategy,
                                                 int count, std::uint64_t seed);

}  // namespace bci
