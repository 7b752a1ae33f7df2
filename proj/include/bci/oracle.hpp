#pragma once

#include <cstdint>
#include <vector>

#include "bci/allocation.hpp"
#include "bci/world.hpp"

namespace bci {

// Exact values carry mc_se = 0; values computed by Monte Carlo fallback
// (interference set larger than the enumeration cap) report the standard
// error of the mean.
struct EstimandValue {
  double value = 0.0;
  double mc_se = 0.0;

  bool exact() const { return mc_se == 0.0; }
};

struct EnumerationPolicy {
  int cap = kDefaultEnumerationCap;
  int samples = 100000;
  std::uint64_t seed = 0;
};

// Average potential outcome at outcome unit j fixing the treatment of
// i in T_j to a, the rest of T_j allocated by the strategy.
EstimandValue ind_avg_po(const PotentialOutcomeWorld& world, int j, int i,
                         int a, const AllocationStrategy& strategy,
                         const EnumerationPolicy& policy = {});

// Direct effect of treating i (vs not) on j under the strategy.
EstimandValue de_ij(const PotentialOutcomeWorld& world, int j, int i,
                    const AllocationStrategy& strategy,
                    const EnumerationPolicy& policy = {});

// Indirect effect on j of shifting the program while holding A_i = a.
EstimandValue ie_ij(const PotentialOutcomeWorld& world, int j, int i, int a,
                    const AllocationStrategy& strategy,
                    const AllocationStrategy& strategy2,
                    const EnumerationPolicy& policy = {});

// Averages over the interference set of j.
EstimandValue m_indexed_po(const PotentialOutcomeWorld& world, int j, int a,
                           const AllocationStrategy& strategy,
                           const EnumerationPolicy& policy = {});
EstimandValue de_j(const PotentialOutcomeWorld& world, int j,
                   const AllocationStrategy& strategy,
                   const EnumerationPolicy& policy = {});
EstimandValue ie_j(const PotentialOutcomeWorld& world, int j, int a,
                   const AllocationStrategy& strategy,
                   const AllocationStrategy& strategy2,
                   const EnumerationPolicy& policy = {});

struct KeyPopulationEffects {
  EstimandValue de;  // mean over outcome units of DE_{(i*,j)}(alpha)
  EstimandValue ie;  // mean over outcome units of IE^a_{(i*,j)}(alpha,alpha')
};

KeyPopulationEffects key_population_effects(const PotentialOutcomeWorld& world,
                                            const std::vector<int>& keys, int a,
                                            const AllocationStrategy& strategy,
                                            const AllocationStrategy& strategy2,
                                            const EnumerationPolicy& policy = {});

// Cluster-level averages under partial interference; population values are
// unweighted 1/K means unless weight_by_cluster_size is set.
struct ClusterEffects {
  std::vector<double> ybar_treated;  // Ybar^k(A_{i*}=1, alpha)
  std::vector<double> ybar_control;  // Ybar^k(A_{i*}=0, alpha)
  std::vector<double> de;            // DE^{k*}(alpha)
  std::vector<double> ie;            // IE^{k*a}(alpha, alpha')
  double pop_ybar_treated = 0.0;
  double pop_ybar_control = 0.0;
  double pop_de = 0.0;
  double pop_ie = 0.0;
};

ClusterEffects cluster_effects(const PotentialOutcomeWorld& world,
                               const ClusterPartition& partition,
                               const std::vector<int>& keys, int a,
                               const AllocationStrategy& strategy,
                               const AllocationStrategy& strategy2,
                               const EnumerationPolicy& policy = {},
                               bool weight_by_cluster_size = false);

// Population average potential outcome Ybar(A_{i*}=a, alpha): 1/K mean of
// per-cluster averages.
double population_avg_po(const PotentialOutcomeWorld& world,
                         const ClusterPartition& partition,
                         const std::vector<int>& keys, int a,
                         const AllocationStrategy& strategy,
                         const EnumerationPolicy& policy = {},
                         bool weight_by_cluster_size = false);

}  // namespace bci
