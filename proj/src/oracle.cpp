#include "bci/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace bci {

namespace {

// Position of i within sorted T_j; throws if absent.
int position_in_set(const std::vector<int>& tj, int i, int j) {
  auto it = std::lower_bound(tj.begin(), tj.end(), i);
  if (it == tj.end() || *it != i)
    throw std::invalid_argument("estimand: unit " + std::to_string(i) +
                                " not in interference set of outcome unit " +
                                std::to_string(j));
  return static_cast<int>(it - tj.begin());
}

// Insert bit `a` at `pos` into a code of width n (complement code -> full
// restricted code over sorted T_j).
std::uint64_t insert_bit(std::uint64_t code, int pos, int a) {
  const std::uint64_t low = code & ((std::uint64_t{1} << pos) - 1);
  const std::uint64_t high = (code >> pos) << (pos + 1);
  return low | high | (static_cast<std::uint64_t>(a) << pos);
}

}  // namespace

EstimandValue ind_avg_po(const PotentialOutcomeWorld& world, int j, int i,
                         int a, const AllocationStrategy& strategy,
                         const EnumerationPolicy& policy) {
  const auto& tj = interference_set(world.mapping(), j);
  const int pos = position_in_set(tj, i, j);
  const int n = static_cast<int>(tj.size()) - 1;

  if (n <= policy.cap) {
    double sum = 0.0;
    for (std::uint64_t s = 0; s < (std::uint64_t{1} << n); ++s) {
      const double p = pi_of_code(s, n, strategy);
      if (p == 0.0) continue;
      sum += world.outcome(j, insert_bit(s, pos, a)) * p;
    }
    return {sum, 0.0};
  }

  // Monte Carlo fallback: sample the complement allocation.
  const int R = policy.samples;
  auto eng = make_engine(policy.seed, static_cast<std::uint64_t>(j),
                         static_cast<std::uint64_t>(i) << 1 | a);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double mean = 0.0, m2 = 0.0;
  for (int r = 0; r < R; ++r) {
    std::uint64_t s = 0;
    for (int b = 0; b < n; ++b)
      if (u(eng) < strategy.alpha) s |= std::uint64_t{1} << b;
    const double y = world.outcome(j, insert_bit(s, pos, a));
    const double d = y - mean;
    mean += d / (r + 1);
    m2 += d * (y - mean);
  }
  const double se = R > 1 ? std::sqrt(m2 / (R - 1) / R) : 0.0;
  return {mean, se == 0.0 ? 1e-300 : se};  // sampled values are never "exact"
}

namespace {
EstimandValue combine(const EstimandValue& x, const EstimandValue& y) {
  return {x.value - y.value,
          std::sqrt(x.mc_se * x.mc_se + y.mc_se * y.mc_se)};
}
}  // namespace

EstimandValue de_ij(const PotentialOutcomeWorld& world, int j, int i,
                    const AllocationStrategy& strategy,
                    const EnumerationPolicy& policy) {
  return combine(ind_avg_po(world, j, i, 1, strategy, policy),
                 ind_avg_po(world, j, i, 0, strategy, policy));
}

EstimandValue ie_ij(const PotentialOutcomeWorld& world, int j, int i, int a,
                    const AllocationStrategy& strategy,
                    const AllocationStrategy& strategy2,
                    const EnumerationPolicy& policy) {
  if (strategy.alpha == strategy2.alpha) return {0.0, 0.0};
  return combine(ind_avg_po(world, j, i, a, strategy, policy),
                 ind_avg_po(world, j, i, a, strategy2, policy));
}

EstimandValue m_indexed_po(const PotentialOutcomeWorld& world, int j, int a,
                           const AllocationStrategy& strategy,
                           const EnumerationPolicy& policy) {
  const auto& tj = interference_set(world.mapping(), j);
  double sum = 0.0, var = 0.0;
  for (int i : tj) {
    const auto v = ind_avg_po(world, j, i, a, strategy, policy);
    sum += v.value;
    var += v.mc_se * v.mc_se;
  }
  const double inv = 1.0 / static_cast<double>(tj.size());
  return {sum * inv, std::sqrt(var) * inv};
}

EstimandValue de_j(const PotentialOutcomeWorld& world, int j,
                   const AllocationStrategy& strategy,
                   const EnumerationPolicy& policy) {
  return combine(m_indexed_po(world, j, 1, strategy, policy),
                 m_indexed_po(world, j, 0, strategy, policy));
}

EstimandValue ie_j(const PotentialOutcomeWorld& world, int j, int a,
                   const AllocationStrategy& strategy,
                   const AllocationStrategy& strategy2,
                   const EnumerationPolicy& policy) {
  if (strategy.alpha == strategy2.alpha) return {0.0, 0.0};
  return combine(m_indexed_po(world, j, a, strategy, policy),
                 m_indexed_po(world, j, a, strategy2, policy));
}

KeyPopulationEffects key_population_effects(const PotentialOutcomeWorld& world,
                                            const std::vector<int>& keys, int a,
                                            const AllocationStrategy& strategy,
                                            const AllocationStrategy& strategy2,
                                            const EnumerationPolicy& policy) {
  const int M = world.mapping().num_outcome;
  if (static_cast<int>(keys.size()) != M)
    throw std::invalid_argument("key_population_effects: keys size mismatch");
  double de_sum = 0.0, de_var = 0.0, ie_sum = 0.0, ie_var = 0.0;
  for (int j = 0; j < M; ++j) {
    const auto d = de_ij(world, j, keys[j], strategy, policy);
    const auto e = ie_ij(world, j, keys[j], a, strategy, strategy2, policy);
    de_sum += d.value;
    de_var += d.mc_se * d.mc_se;
    ie_sum += e.value;
    ie_var += e.mc_se * e.mc_se;
  }
  const double inv = 1.0 / M;
  return {{de_sum * inv, std::sqrt(de_var) * inv},
          {ie_sum * inv, std::sqrt(ie_var) * inv}};
}

namespace {
double cluster_mean_po(const PotentialOutcomeWorld& world,
                       const std::vector<int>& members,
                       const std::vector<int>& keys, int a,
                       const AllocationStrategy& strategy,
                       const EnumerationPolicy& policy) {
  double sum = 0.0;
  for (int j : members)
    sum += ind_avg_po(world, j, keys[j], a, strategy, policy).value;
  return sum / static_cast<double>(members.size());
}
}  // namespace

ClusterEffects cluster_effects(const PotentialOutcomeWorld& world,
                               const ClusterPartition& partition,
                               const std::vector<int>& keys, int a,
                               const AllocationStrategy& strategy,
                               const AllocationStrategy& strategy2,
                               const EnumerationPolicy& policy,
                               bool weight_by_cluster_size) {
  const auto check = check_partial_against_partition(world.mapping(), partition);
  if (!check.ok)
    throw std::invalid_argument(
        "cluster_effects: partition violates partial interference");
  const auto members = partition.outcome_members();
  const int K = partition.num_clusters;

  ClusterEffects out;
  out.ybar_treated.resize(K);
  out.ybar_control.resize(K);
  out.de.resize(K);
  out.ie.resize(K);
  double wsum = 0.0;
  for (int k = 0; k < K; ++k) {
    const auto& mk = members[k];
    out.ybar_treated[k] = cluster_mean_po(world, mk, keys, 1, strategy, policy);
    out.ybar_control[k] = cluster_mean_po(world, mk, keys, 0, strategy, policy);
    out.de[k] = out.ybar_treated[k] - out.ybar_control[k];
    const double ya = a == 1 ? out.ybar_treated[k] : out.ybar_control[k];
    const double ya2 = strategy.alpha == strategy2.alpha
                           ? ya
                           : cluster_mean_po(world, mk, keys, a, strategy2, policy);
    out.ie[k] = ya - ya2;
    const double w = weight_by_cluster_size ? static_cast<double>(mk.size()) : 1.0;
    wsum += w;
    out.pop_ybar_treated += w * out.ybar_treated[k];
    out.pop_ybar_control += w * out.ybar_control[k];
    out.pop_de += w * out.de[k];
    out.pop_ie += w * out.ie[k];
  }
  out.pop_ybar_treated /= wsum;
  out.pop_ybar_control /= wsum;
  out.pop_de /= wsum;
  out.pop_ie /= wsum;
  return out;
}

double population_avg_po(const PotentialOutcomeWorld& world,
                         const ClusterPartition& partition,
                         const std::vector<int>& keys, int a,
                         const AllocationStrategy& strategy,
                         const EnumerationPolicy& policy,
                         bool weight_by_cluster_size) {
  const auto members = partition.outcome_members();
  double sum = 0.0, wsum = 0.0;
  for (const auto& mk : members) {
    const double w = weight_by_cluster_size ? static_cast<double>(mk.size()) : 1.0;
    sum += w * cluster_mean_po(world, mk, keys, a, strategy, policy);
    wsum += w;
  }
  return sum / wsum;
}

}  // namespace bci
