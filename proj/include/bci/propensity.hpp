#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "bci/data_model.hpp"

namespace bci {

// Unit-level logistic model for treatment, optionally with a cluster-specific
// random intercept of standard deviation sigma (sigma = 0 disables it).
// Coefficients are stored on the standardized covariate scale together with
// the standardization parameters, so raw-scale coefficients are recoverable.
struct LogisticModel {
  Eigen::VectorXd beta;            // intercept + one per covariate (standardized scale)
  double sigma = 0.0;
  std::vector<int> w_columns;      // selected interventional covariate columns
  std::vector<std::string> covariate_names;
  Eigen::VectorXd center;          // per-covariate mean
  Eigen::VectorXd scale;           // per-covariate sd (1 where constant)

  // Fitted unit probability from raw covariate values.
  double unit_probability(const std::vector<double>& w,
                          double random_effect = 0.0) const;

  // Coefficients mapped back to the raw covariate scale.
  Eigen::VectorXd raw_coefficients() const;
};

struct PropensityFit {
  LogisticModel model;
  int iterations = 0;
  double grad_norm = 0.0;
  double log_likelihood = 0.0;
  bool converged = false;
};

struct PropensityOptions {
  std::vector<int> w_columns;      // empty = all interventional covariates
  bool random_intercept = false;
  int quadrature_nodes = 21;
  double tol = 1e-8;
  int max_iterations = 100;
};

// Maximum likelihood fit of the treatment model. sigma = 0 mode uses IRLS;
// random-intercept mode maximizes the Gauss-Hermite marginal likelihood by
// BFGS. Throws on perfect separation and on rank-deficient designs.
PropensityFit fit_logistic(const BipartiteDataset& ds,
                           const ClusterPartition& part,
                           const PropensityOptions& options = {});

// log f(A^k | W^k, k): product of unit Bernoulli probabilities when
// sigma = 0; the random intercept is integrated out by the same quadrature
// rule otherwise.
double log_cluster_probability(const LogisticModel& model,
                               const BipartiteDataset& ds,
                               const ClusterPartition& part, int k,
                               int quadrature_nodes = 21);

inline double cluster_joint_probability(const LogisticModel& model,
                                        const BipartiteDataset& ds,
                                        const ClusterPartition& part, int k,
                                        int quadrature_nodes = 21) {
  return std::exp(log_cluster_probability(model, ds, part, k, quadrature_nodes));
}

// Known-propensity denominator: per-unit true probabilities.
double log_cluster_probability_known(const std::vector<double>& probs,
                                     const std::vector<int>& treatments);

// Marginal log-likelihood of (beta, sigma) on the dataset; exposed for
// score/finite-difference checks.
double marginal_log_likelihood(const Eigen::VectorXd& beta, double sigma,
                               const Eigen::MatrixXd& design,
                               const Eigen::VectorXi& treatment,
                               const std::vector<std::vector<int>>& clusters,
                               int quadrature_nodes);

// Analytic score of the marginal log-likelihood in (beta, sigma).
Eigen::VectorXd marginal_score(const Eigen::VectorXd& beta, double sigma,
                               const Eigen::MatrixXd& design,
                               const Eigen::VectorXi& treatment,
                               const std::vector<std::vector<int>>& clusters,
                               int quadrature_nodes);

// Standardized design matrix (leading intercept column) for the model's
// covariate selection, plus the response; shared by fitting and checks.
struct DesignData {
  Eigen::MatrixXd design;
  Eigen::VectorXi treatment;
  std::vector<std::vector<int>> clusters;
  Eigen::VectorXd center, scale;
  std::vector<int> columns;
  std::vector<std::string> names;
};
DesignData build_design(const BipartiteDataset& ds, const ClusterPartition& part,
                        const std::vector<int>& w_columns);

// Physicists' Gauss-Hermite rule (weight exp(-x^2)) via Golub-Welsch.
void gauss_hermite(int n, Eigen::VectorXd& nodes, Eigen::VectorXd& weights);

struct PositivityFlag {
  int cluster = 0;
  double alpha = 0.0;
  double weight = 0.0;
};

struct PositivityReport {
  // weight[k][g]: pi(A^k | alpha_g) / f(A^k) for the full cluster vector.
  std::vector<std::vector<double>> weights;
  std::vector<PositivityFlag> flags;
  double threshold = 50.0;
};

PositivityReport positivity_diagnostics(
    const std::vector<double>& log_denominators,
    const std::vector<std::vector<int>>& cluster_treatments,
    const std::vector<double>& alpha_grid, double threshold = 50.0);

}  // namespace bci
