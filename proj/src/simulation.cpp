#include "bci/simulation.hpp"

#include <cmath>
#include <stdexcept>

#include "bci/rng.hpp"

namespace bci {

namespace {
double logistic(double x) { return 1.0 / (1.0 + std::exp(-x)); }
}  // namespace

WorldBundle generate_world(const DGPConfig& cfg) {
  if (cfg.num_clusters < 2)
    throw std::invalid_argument("generate_world: need at least 2 clusters");
  if (cfg.min_plants < 1 || cfg.min_outcomes < 1)
    throw std::invalid_argument("generate_world: cluster sizes must be >= 1");
  std::vector<double> beta = cfg.beta;
  if (beta.empty()) beta.assign(cfg.cov_dim + 1, 0.0);
  if (static_cast<int>(beta.size()) != cfg.cov_dim + 1)
    throw std::invalid_argument("generate_world: beta length != cov_dim + 1");

  auto eng_sizes = make_engine(cfg.seed, 0xC0);
  auto eng_cov = make_engine(cfg.seed, 0xC1);
  auto eng_world = make_engine(cfg.seed, 0xC2);
  auto eng_keys = make_engine(cfg.seed, 0xC3);
  auto eng_reff = make_engine(cfg.seed, 0xC4);
  std::uniform_int_distribution<int> plant_count(cfg.min_plants, cfg.max_plants);
  std::uniform_int_distribution<int> outcome_count(cfg.min_outcomes,
                                                   cfg.max_outcomes);
  std::normal_distribution<double> normal(0.0, 1.0);

  WorldBundle b{.dataset = {},
                .partition = {},
                .mapping = {},
                .world = PotentialOutcomeWorld::linear(
                    build_mapping(1, 1, {{0, 0}}), {0.0}, {{0.0}}),
                .true_propensity = {},
                .keys = {}};
  b.partition.num_clusters = cfg.num_clusters;

  std::vector<std::pair<int, int>> edges;
  std::vector<double> intercepts;
  std::vector<std::vector<double>> coefs;
  std::vector<double> gamma, scale;
  std::vector<int> q;
  std::uniform_real_distribution<double> u_intercept(cfg.intercept_min,
                                                     cfg.intercept_max);
  std::uniform_real_distribution<double> u_coef(cfg.coef_min, cfg.coef_max);

  for (int k = 0; k < cfg.num_clusters; ++k) {
    const int np = plant_count(eng_sizes);
    const int nm = outcome_count(eng_sizes);
    const double reff = cfg.sigma > 0.0 ? cfg.sigma * normal(eng_reff) : 0.0;
    std::vector<int> plants;
    for (int t = 0; t < np; ++t) {
      InterventionalUnit u;
      const int i = b.dataset.num_interventional();
      u.id = "p" + std::to_string(i + 1);
      u.covariates.resize(cfg.cov_dim);
      double eta = beta[0] + reff;
      for (int c = 0; c < cfg.cov_dim; ++c) {
        u.covariates[c] = normal(eng_cov);
        eta += beta[c + 1] * u.covariates[c];
      }
      b.true_propensity.push_back(logistic(eta));
      b.dataset.interventional.push_back(std::move(u));
      b.partition.interventional_cluster.push_back(k);
      plants.push_back(i);
    }
    for (int t = 0; t < nm; ++t) {
      OutcomeUnit u;
      const int j = b.dataset.num_outcome();
      u.id = "m" + std::to_string(j + 1);
      u.covariates = {};
      b.dataset.outcome.push_back(std::move(u));
      b.partition.outcome_cluster.push_back(k);
      for (int i : plants) edges.emplace_back(j, i);

      intercepts.push_back(u_intercept(eng_world));
      std::vector<double> bj(np);
      for (double& v : bj) v = u_coef(eng_world);
      coefs.push_back(std::move(bj));
      gamma.push_back(cfg.interaction);
      scale.push_back(cfg.threshold_scale);
      q.push_back(cfg.threshold_q);

      std::uniform_int_distribution<int> pick(0, np - 1);
      b.keys.push_back(plants[pick(eng_keys)]);
    }
  }
  b.dataset.rebuild_index();
  b.mapping = build_mapping(b.dataset.num_outcome(),
                            b.dataset.num_interventional(), edges);

  if (cfg.world_family == "linear") {
    b.world = PotentialOutcomeWorld::linear(b.mapping, std::move(intercepts),
                                            std::move(coefs));
  } else if (cfg.world_family == "interactive") {
    b.world = PotentialOutcomeWorld::interactive(
        b.mapping, std::move(intercepts), std::move(coefs), std::move(gamma));
  } else if (cfg.world_family == "threshold") {
    b.world = PotentialOutcomeWorld::threshold(b.mapping, std::move(scale),
                                               std::move(q));
  } else {
    throw std::invalid_argument("generate_world: unknown world family " +
                                cfg.world_family);
  }
  return b;
}

void draw_replicate(const WorldBundle& bundle, double noise_sd,
                    std::uint64_t seed, std::uint64_t replicate, IptwData& d) {
  auto eng_a = make_engine(seed, replicate, 1);
  auto eng_y = make_engine(seed, replicate, 2);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::normal_distribution<double> noise(0.0, 1.0);

  const int P = bundle.dataset.num_interventional();
  const int M = bundle.dataset.num_outcome();
  d.treatments.resize(P);
  d.outcomes.resize(M);
  for (int i = 0; i < P; ++i)
    d.treatments[i] = u(eng_a) < bundle.true_propensity[i] ? 1 : 0;

  for (int j = 0; j < M; ++j) {
    const auto& tj = bundle.mapping.rows[j];
    std::uint64_t code = 0;
    for (std::size_t bpos = 0; bpos < tj.size(); ++bpos)
      if (d.treatments[tj[bpos]]) code |= std::uint64_t{1} << bpos;
    double y = bundle.world.outcome(j, code);
    if (noise_sd > 0.0) y += noise_sd * noise(eng_y);
    d.outcomes[j] = y;
  }

  const int K = bundle.partition.num_clusters;
  d.log_denominators.resize(K);
  for (int k = 0; k < K; ++k) {
    double ll = 0.0;
    for (int i : d.cluster_plants[k]) {
      const double p = bundle.true_propensity[i];
      ll += d.treatments[i] ? std::log(p) : std::log1p(-p);
    }
    d.log_denominators[k] = ll;
  }
}

SimulationReport run_monte_carlo(const WorldBundle& bundle,
                                 const EstimatorConfig& config, int replicates,
                                 PropensityMode mode, double noise_sd,
                                 std::uint64_t seed) {
  if (replicates < 2)
    throw std::invalid_argument("run_monte_carlo: need at least 2 replicates");
  if (config.alpha_grid.empty())
    throw std::invalid_argument("run_monte_carlo: empty alpha grid");

  const int K = bundle.partition.num_clusters;
  const std::size_t G = config.alpha_grid.size();

  // Oracle truth (noiseless).
  std::vector<double> truth_ybar(2 * G);
  std::vector<double> truth_de(G);
  for (std::size_t g = 0; g < G; ++g) {
    const AllocationStrategy strat{config.alpha_grid[g]};
    for (int a : {0, 1})
      truth_ybar[a * G + g] = population_avg_po(
          bundle.world, bundle.partition, bundle.keys, a, strat);
    truth_de[g] = truth_ybar[G + g] - truth_ybar[g];
  }

  struct Acc {
    double mean = 0.0, m2 = 0.0;
    int covered = 0;
    void add(double x, int n) {
      const double delta = x - mean;
      mean += delta / n;
      m2 += delta * (x - mean);
    }
  };
  std::vector<Acc> acc_ybar(2 * G), acc_de(G);

  IptwData d;
  d.cluster_plants = bundle.partition.interventional_members();
  d.cluster_outcomes = bundle.partition.outcome_members();
  d.keys = bundle.keys;

  BipartiteDataset fit_ds;  // scratch copy for fitted mode
  if (mode == PropensityMode::Fitted) fit_ds = bundle.dataset;

  for (int r = 0; r < replicates; ++r) {
    draw_replicate(bundle, noise_sd, seed, static_cast<std::uint64_t>(r), d);

    if (mode == PropensityMode::Fitted) {
      for (int i = 0; i < fit_ds.num_interventional(); ++i)
        fit_ds.interventional[i].treatment = d.treatments[i];
      PropensityOptions popt;
      popt.random_intercept = false;
      const auto fit = fit_logistic(fit_ds, bundle.partition, popt);
      for (int k = 0; k < K; ++k)
        d.log_denominators[k] =
            log_cluster_probability(fit.model, fit_ds, bundle.partition, k);
    }

    for (std::size_t g = 0; g < G; ++g) {
      const double alpha = config.alpha_grid[g];
      std::vector<double> c0(K), c1(K);
      for (int k = 0; k < K; ++k) {
        c0[k] = cluster_estimate(d, k, 0, alpha, config.truncation).value;
        c1[k] = cluster_estimate(d, k, 1, alpha, config.truncation).value;
      }
      const auto e0 = population_estimate(c0);
      const auto e1 = population_estimate(c1);
      acc_ybar[g].add(e0.point, r + 1);
      acc_ybar[G + g].add(e1.point, r + 1);
      if (e0.has_ci && truth_ybar[g] >= e0.ci_low && truth_ybar[g] <= e0.ci_high)
        ++acc_ybar[g].covered;
      if (e1.has_ci && truth_ybar[G + g] >= e1.ci_low &&
          truth_ybar[G + g] <= e1.ci_high)
        ++acc_ybar[G + g].covered;

      std::vector<double> diff(K);
      for (int k = 0; k < K; ++k) diff[k] = c1[k] - c0[k];
      const auto de = contrast_estimate(diff);
      acc_de[g].add(de.point, r + 1);
      if (de.has_ci && truth_de[g] >= de.ci_low && truth_de[g] <= de.ci_high)
        ++acc_de[g].covered;
    }
  }

  SimulationReport rep;
  rep.replicates = replicates;
  rep.mode = mode;
  auto emit = [&](const std::string& tag, const Acc& acc, double truth) {
    SimulationCell cell;
    cell.tag = tag;
    cell.truth = truth;
    cell.mc_mean = acc.mean;
    cell.mc_sd = std::sqrt(acc.m2 / (replicates - 1));
    cell.mc_se = cell.mc_sd / std::sqrt(static_cast<double>(replicates));
    cell.bias = acc.mean - truth;
    cell.relative_bias = truth != 0.0 ? cell.bias / truth : cell.bias;
    cell.coverage = static_cast<double>(acc.covered) / replicates;
    cell.replicates = replicates;
    rep.cells.push_back(std::move(cell));
  };
  for (int a : {0, 1})
    for (std::size_t g = 0; g < G; ++g)
      emit("ybar a=" + std::to_string(a) +
               " alpha=" + std::to_string(config.alpha_grid[g]),
           acc_ybar[a * G + g], truth_ybar[a * G + g]);
  for (std::size_t g = 0; g < G; ++g)
    emit("DE alpha=" + std::to_string(config.alpha_grid[g]), acc_de[g],
         truth_de[g]);
  return rep;
}

}  // namespace bci
