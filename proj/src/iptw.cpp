#include "bci/iptw.hpp"

#include <cmath>
#include <stdexcept>

namespace bci {

ClusterContribution cluster_estimate(const IptwData& d, int k, int a,
                                     double alpha,
                                     const std::optional<double>& truncation) {
  const auto& plants = d.cluster_plants[k];
  const auto& outcomes = d.cluster_outcomes[k];
  ClusterContribution out;
  out.k = k;

  // log pi over the full cluster vector; the key unit's factor is divided
  // back out per outcome unit.
  double log_pi_full = 0.0;
  bool degenerate_mismatch = false;
  for (int i : plants) {
    const double term =
        d.treatments[i] ? std::log(alpha) : std::log1p(-alpha);
    if (!std::isfinite(term)) degenerate_mismatch = true;
    log_pi_full += term;
  }

  double sum = 0.0;
  for (int j : outcomes) {
    const int key = d.keys[j];
    if (d.treatments[key] != a) continue;
    ++out.units_used;
    double log_num;
    if (degenerate_mismatch) {
      // alpha in {0,1} with some unit off the point mass: recompute the
      // complement product directly (it is exactly 0 unless the only
      // mismatch is the key itself).
      log_num = 0.0;
      for (int i : plants) {
        if (i == key) continue;
        log_num += d.treatments[i] ? std::log(alpha) : std::log1p(-alpha);
      }
    } else {
      const double key_term =
          d.treatments[key] ? std::log(alpha) : std::log1p(-alpha);
      log_num = log_pi_full - key_term;
    }
    double w = std::exp(log_num - d.log_denominators[k]);
    if (truncation && w > *truncation) w = *truncation;
    out.max_weight = std::max(out.max_weight, w);
    sum += w * d.outcomes[j];
  }
  out.value = sum / static_cast<double>(outcomes.size());
  return out;
}

EstimateWithCI population_estimate(const std::vector<double>& contributions) {
  EstimateWithCI out;
  const int K = static_cast<int>(contributions.size());
  if (K == 0) throw std::invalid_argument("population_estimate: no clusters");
  double mean = 0.0;
  for (double v : contributions) mean += v;
  mean /= K;
  out.point = mean;
  if (K < 2) return out;
  double ss = 0.0;
  for (double v : contributions) ss += (v - mean) * (v - mean);
  out.std_error = std::sqrt(ss / (static_cast<double>(K) * (K - 1)));
  out.ci_low = out.point - kWald975 * out.std_error;
  out.ci_high = out.point + kWald975 * out.std_error;
  out.has_ci = true;
  return out;
}

EstimateWithCI contrast_estimate(const std::vector<double>& contrasts) {
  return population_estimate(contrasts);
}

IptwReport estimate_all(const IptwData& d, const InterferenceMapping& mapping,
                        const ClusterPartition& partition,
                        const EstimatorConfig& config) {
  if (config.alpha_grid.empty())
    throw std::invalid_argument("estimate_all: empty alpha grid");
  for (double alpha : config.alpha_grid)
    if (alpha < 0.0 || alpha > 1.0)
      throw std::invalid_argument("estimate_all: alpha outside [0,1]");
  const auto check = check_partial_against_partition(mapping, partition);
  if (!check.ok)
    throw std::invalid_argument(
        "estimate_all: partition violates partial interference");

  const int K = static_cast<int>(d.cluster_plants.size());
  IptwReport rep;

  // Grid of population average potential outcomes.
  // cell_values[(a, g)] holds the per-cluster contributions.
  auto cell_values = [&](int a, double alpha) {
    std::vector<double> vals(K);
    for (int k = 0; k < K; ++k)
      vals[k] = cluster_estimate(d, k, a, alpha, config.truncation).value;
    return vals;
  };

  std::vector<std::vector<double>> values_by_cell;
  for (int a : {0, 1}) {
    for (double alpha : config.alpha_grid) {
      GridCell cell;
      cell.a = a;
      cell.alpha = alpha;
      cell.cluster_values = cell_values(a, alpha);
      cell.estimate = population_estimate(cell.cluster_values);
      rep.ybar.push_back(std::move(cell));
    }
  }
  const std::size_t G = config.alpha_grid.size();
  auto cell = [&](int a, std::size_t g) -> const GridCell& {
    return rep.ybar[a * G + g];
  };

  // DE*(alpha) from per-cluster paired contrasts.
  for (std::size_t g = 0; g < G; ++g) {
    EffectRow row;
    row.estimand = "DE";
    row.alpha = config.alpha_grid[g];
    std::vector<double> diff(K);
    for (int k = 0; k < K; ++k)
      diff[k] = cell(1, g).cluster_values[k] - cell(0, g).cluster_values[k];
    row.estimate = contrast_estimate(diff);
    rep.effects.push_back(std::move(row));
  }

  // IE*a(alpha, alpha') for ordered pairs; identical strategies are exactly
  // zero with zero standard error.
  const int a = config.a_level;
  for (std::size_t g = 0; g < G; ++g) {
    for (std::size_t h = 0; h < G; ++h) {
      if (g == h) continue;
      EffectRow row;
      row.estimand = "IE";
      row.a = a;
      row.alpha = config.alpha_grid[g];
      row.alpha2 = config.alpha_grid[h];
      if (config.alpha_grid[g] == config.alpha_grid[h]) {
        row.estimate.has_ci = true;
      } else {
        std::vector<double> diff(K);
        for (int k = 0; k < K; ++k)
          diff[k] = cell(a, g).cluster_values[k] - cell(a, h).cluster_values[k];
        row.estimate = contrast_estimate(diff);
      }
      rep.effects.push_back(std::move(row));
    }
  }

  std::vector<std::vector<int>> cluster_treatments(K);
  for (int k = 0; k < K; ++k)
    for (int i : d.cluster_plants[k])
      cluster_treatments[k].push_back(d.treatments[i]);
  rep.positivity =
      positivity_diagnostics(d.log_denominators, cluster_treatments,
                             config.alpha_grid, config.positivity_threshold);
  return rep;
}

IptwData make_iptw_data(const BipartiteDataset& ds,
                        const ClusterPartition& partition,
                        const std::vector<int>& keys,
                        const std::vector<double>& log_denominators) {
  IptwData d;
  d.cluster_plants = partition.interventional_members();
  d.cluster_outcomes = partition.outcome_members();
  d.keys = keys;
  d.log_denominators = log_denominators;
  d.treatments.resize(ds.num_interventional());
  d.outcomes.resize(ds.num_outcome());
  for (int i = 0; i < ds.num_interventional(); ++i) {
    const auto& u = ds.interventional[i];
    if (!u.treatment)
      throw std::runtime_error("make_iptw_data: unobserved treatment for " + u.id);
    d.treatments[i] = *u.treatment;
  }
  for (int j = 0; j < ds.num_outcome(); ++j) {
    const auto& u = ds.outcome[j];
    if (!u.outcome)
      throw std::runtime_error("make_iptw_data: unobserved outcome for " + u.id);
    d.outcomes[j] = *u.outcome;
  }
  return d;
}

IptwData make_iptw_data(const BipartiteDataset& ds,
                        const ClusterPartition& partition,
                        const std::vector<int>& keys,
                        const LogisticModel& model, int quadrature_nodes) {
  std::vector<double> logf(partition.num_clusters);
  for (int k = 0; k < partition.num_clusters; ++k)
    logf[k] = log_cluster_probability(model, ds, partition, k, quadrature_nodes);
  return make_iptw_data(ds, partition, keys, logf);
}

}  // namespace bci
