#include "bci/allocation.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>

namespace bci {

double pi_conditional(const AllocationVector& s, const AllocationStrategy& strategy) {
  const double a = strategy.alpha;
  double p = 1.0;
  for (std::uint8_t bit : s) p *= bit ? a : 1.0 - a;
  return p;
}

double pi_of_code(std::uint64_t code, int n, const AllocationStrategy& strategy) {
  const int treated = std::popcount(code);
  const double a = strategy.alpha;
  // pow handles the 0^0 = 1 corners of the degenerate strategies.
  return std::pow(a, treated) * std::pow(1.0 - a, n - treated);
}

std::vector<AllocationVector> enumerate_allocations(int n, int cap) {
  if (n < 0) throw std::invalid_argument("enumerate_allocations: negative n");
  if (n > cap)
    throw std::invalid_argument(
        "enumerate_allocations: n = " + std::to_string(n) +
        " exceeds cap " + std::to_string(cap) + "; use sample_allocations");
  std::vector<AllocationVector> out;
  out.reserve(std::size_t{1} << n);
  for (std::uint64_t code = 0; code < (std::uint64_t{1} << n); ++code) {
    AllocationVector v(n);
    for (int b = 0; b < n; ++b) v[b] = (code >> b) & 1u;
    out.push_back(std::move(v));
  }
  return out;
}

std::vector<AllocationVector> sample_allocations(int n,
                                                 const AllocationStrategy& strategy,
                                                 int count, std::uint64_t seed) {
  if (count < 1) throw std::invalid_argument("sample_allocations: count < 1");
  std::vector<AllocationVector> out;
  out.reserve(count);
  for (int r = 0; r < count; ++r) {
    auto eng = make_engine(seed, static_cast<std::uint64_t>(r));
    std::uniform_real_distribution<double> u(0.0, 1.0);
    AllocationVector v(n);
    for (int b = 0; b < n; ++b) v[b] = u(eng) < strategy.alpha ? 1 : 0;
    out.push_back(std::move(v));
  }
  return out;
}

}  // namespace bci
