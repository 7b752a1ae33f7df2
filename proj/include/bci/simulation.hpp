#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bci/iptw.hpp"
#include "bci/oracle.hpp"
#include "bci/world.hpp"

namespace bci {

struct DGPConfig {
  int num_clusters = 200;
  int min_plants = 2, max_plants = 5;
  int min_outcomes = 1, max_outcomes = 4;
  int cov_dim = 2;
  std::vector<double> beta;        // raw-scale: intercept + cov_dim slopes
  double sigma = 0.0;              // random-intercept sd of the true propensity
  std::string world_family = "linear";  // linear | interactive | threshold
  double intercept_min = 0.0, intercept_max = 2.0;
  double coef_min = 0.5, coef_max = 1.5;
  double interaction = 0.5;        // interactive family
  int threshold_q = 1;             // threshold family
  double threshold_scale = 1.0;
  double noise_sd = 1.0;
  std::uint64_t seed = 1;
};

// Everything a Monte Carlo experiment needs: block-partial mapping,
// noiseless ground-truth world, true unit propensities, key assignments.
struct WorldBundle {
  BipartiteDataset dataset;        // covariates only; A and Y filled per draw
  ClusterPartition partition;
  InterferenceMapping mapping;
  PotentialOutcomeWorld world;
  std::vector<double> true_propensity;  // per interventional unit
  std::vector<int> keys;
};

// Deterministic given config.seed. The mapping is exactly block-partial
// (T_j = P^k); keys are drawn uniformly from P^k per outcome unit.
WorldBundle generate_world(const DGPConfig& config);

// Draw treatments from the true propensity and outcomes from the world plus
// noise, writing into d.treatments / d.outcomes / d.log_denominators.
// Replicate r uses substreams (seed, r, *).
void draw_replicate(const WorldBundle& bundle, double noise_sd,
                    std::uint64_t seed, std::uint64_t replicate, IptwData& d);

enum class PropensityMode { Known, Fitted };

struct SimulationCell {
  std::string tag;                 // e.g. "ybar a=1 alpha=0.5", "DE alpha=0.5"
  double truth = 0.0;
  double mc_mean = 0.0;
  double mc_sd = 0.0;
  double mc_se = 0.0;              // standard error of mc_mean
  double bias = 0.0;
  double relative_bias = 0.0;
  double coverage = 0.0;           // 95% Wald CI coverage of truth
  int replicates = 0;
};

struct SimulationReport {
  std::vector<SimulationCell> cells;
  int replicates = 0;
  PropensityMode mode = PropensityMode::Known;
};

SimulationReport run_monte_carlo(const WorldBundle& bundle,
                                 const EstimatorConfig& config, int replicates,
                                 PropensityMode mode, double noise_sd,
                                 std::uint64_t seed);

}  // namespace bci
