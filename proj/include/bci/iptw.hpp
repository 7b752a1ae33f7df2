#pragma once

#include <optional>
#include <string>
#include <vector>

#include "bci/data_model.hpp"
#include "bci/interference.hpp"
#include "bci/propensity.hpp"

namespace bci {

struct EstimatorConfig {
  std::vector<double> alpha_grid;
  int a_level = 0;                       // fixed level a for indirect effects
  std::optional<double> truncation;      // per-unit weight cap, off by default
  double positivity_threshold = 50.0;
};

struct EstimateWithCI {
  double point = 0.0;
  double std_error = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  bool has_ci = false;
};

// 97.5% normal quantile used for Wald intervals.
inline constexpr double kWald975 = 1.959964;

struct ClusterContribution {
  int k = 0;
  double value = 0.0;       // Yhat^k(A_{i*}=a; alpha)
  double max_weight = 0.0;  // largest realized per-unit weight
  int units_used = 0;       // outcome units with A_{i*} = a
};

// Flattened observed data plus precomputed cluster structure; shared by the
// dataset-level API and the simulation loop (which rewrites treatments and
// outcomes in place between replicates).
struct IptwData {
  std::vector<std::vector<int>> cluster_plants;    // P^k, ascending
  std::vector<std::vector<int>> cluster_outcomes;  // M^k, ascending
  std::vector<int> keys;                           // i*(j), dataset indices
  std::vector<int> treatments;                     // A_i
  std::vector<double> outcomes;                    // Y_j
  std::vector<double> log_denominators;            // log f(A^k | .)
};

// Eq.-level evaluation of the cluster estimator: the key index, indicator,
// and numerator are evaluated per outcome unit j since i*(j) varies within
// a cluster.
ClusterContribution cluster_estimate(const IptwData& d, int k, int a,
                                     double alpha,
                                     const std::optional<double>& truncation = {});

// Mean over clusters with the empirical between-cluster variance; no CI for
// K < 2.
EstimateWithCI population_estimate(const std::vector<double>& contributions);

// Point and variance from per-cluster paired contrasts.
EstimateWithCI contrast_estimate(const std::vector<double>& contrasts);

struct GridCell {
  int a = 0;
  double alpha = 0.0;
  EstimateWithCI estimate;
  std::vector<double> cluster_values;  // audit trail
};

struct EffectRow {
  std::string estimand;  // "DE" or "IE"
  int a = 0;             // fixed level (IE only)
  double alpha = 0.0;
  double alpha2 = 0.0;   // IE only
  EstimateWithCI estimate;
};

struct IptwReport {
  std::vector<GridCell> ybar;     // Yhat(a; alpha) over {0,1} x grid
  std::vector<EffectRow> effects; // DE*(alpha) and IE*a(alpha, alpha')
  PositivityReport positivity;
};

// Full pipeline: validates partial interference, evaluates the (a, alpha)
// grid, direct effects per alpha, and indirect effects for every ordered
// pair of distinct grid values at the configured a level.
IptwReport estimate_all(const IptwData& d, const InterferenceMapping& mapping,
                        const ClusterPartition& partition,
                        const EstimatorConfig& config);

// Assemble IptwData from a dataset with observed treatments/outcomes and a
// propensity denominator (fitted model or known unit probabilities).
IptwData make_iptw_data(const BipartiteDataset& ds,
                        const ClusterPartition& partition,
                        const std::vector<int>& keys,
                        const std::vector<double>& log_denominators);
IptwData make_iptw_data(const BipartiteDataset& ds,
                        const ClusterPartition& partition,
                        const std::vector<int>& keys,
                        const LogisticModel& model, int quadrature_nodes = 21);

}  // namespace bci
