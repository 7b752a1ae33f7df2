#include "bci/propensity.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace bci {

namespace {

constexpr double kSqrtPi = 1.7724538509055160273;
constexpr double kSqrt2 = 1.4142135623730950488;

double softplus(double x) {
  return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

double logistic(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// log Bernoulli(a | logistic(eta))
double log_bern(int a, double eta) {
  return a ? -softplus(-eta) : -softplus(eta);
}

}  // namespace

void gauss_hermite(int n, Eigen::VectorXd& nodes, Eigen::VectorXd& weights) {
  if (n < 1) throw std::invalid_argument("gauss_hermite: n < 1");
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
  for (int k = 1; k < n; ++k) {
    const double b = std::sqrt(k / 2.0);
    jacobi(k, k - 1) = b;
    jacobi(k - 1, k) = b;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jacobi);
  nodes = es.eigenvalues();
  weights.resize(n);
  for (int k = 0; k < n; ++k) {
    const double v = es.eigenvectors()(0, k);
    weights[k] = kSqrtPi * v * v;
  }
}

DesignData build_design(const BipartiteDataset& ds, const ClusterPartition& part,
                        const std::vector<int>& w_columns) {
  const int n = ds.num_interventional();
  if (n == 0) throw std::invalid_argument("build_design: empty dataset");
  const int dim = static_cast<int>(ds.interventional.front().covariates.size());
  std::vector<int> cols = w_columns;
  if (cols.empty())
    for (int c = 0; c < dim; ++c) cols.push_back(c);
  for (int c : cols)
    if (c < 0 || c >= dim)
      throw std::out_of_range("build_design: covariate column out of range");

  DesignData d;
  const int p = static_cast<int>(cols.size());
  d.design.resize(n, p + 1);
  d.treatment.resize(n);
  d.center.resize(p);
  d.scale.resize(p);
  d.columns = cols;
  for (std::size_t c = 0; c < cols.size(); ++c)
    d.names.push_back("W" + std::to_string(cols[c] + 1));

  for (int i = 0; i < n; ++i) {
    const auto& u = ds.interventional[i];
    if (!u.treatment)
      throw std::runtime_error("build_design: unobserved treatment for " + u.id);
    d.treatment[i] = *u.treatment;
    d.design(i, 0) = 1.0;
    for (int c = 0; c < p; ++c) d.design(i, c + 1) = u.covariates[cols[c]];
  }
  for (int c = 0; c < p; ++c) {
    const auto col = d.design.col(c + 1);
    d.center[c] = col.mean();
    const double var =
        (col.array() - d.center[c]).square().sum() / std::max(1, n - 1);
    d.scale[c] = var > 1e-24 ? std::sqrt(var) : 1.0;
    d.design.col(c + 1) = (col.array() - d.center[c]) / d.scale[c];
  }

  if (part.num_clusters > 0) {
    d.clusters.resize(part.num_clusters);
    for (int i = 0; i < n; ++i)
      d.clusters[part.interventional_cluster[i]].push_back(i);
  } else {
    d.clusters.assign(1, {});
    for (int i = 0; i < n; ++i) d.clusters[0].push_back(i);
  }
  return d;
}

double LogisticModel::unit_probability(const std::vector<double>& w,
                                       double random_effect) const {
  double eta = beta[0] + random_effect;
  for (int c = 0; c < center.size(); ++c)
    eta += beta[c + 1] * (w[w_columns[c]] - center[c]) / scale[c];
  return logistic(eta);
}

Eigen::VectorXd LogisticModel::raw_coefficients() const {
  Eigen::VectorXd raw = beta;
  for (int c = 0; c < center.size(); ++c) {
    raw[c + 1] = beta[c + 1] / scale[c];
    raw[0] -= beta[c + 1] * center[c] / scale[c];
  }
  return raw;
}

namespace {

void check_rank(const Eigen::MatrixXd& design,
                const std::vector<std::string>& names) {
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
  qr.setThreshold(1e-10);
  if (qr.rank() == design.cols()) return;
  std::string msg = "fit_logistic: rank-deficient design; dependent columns:";
  const auto& perm = qr.colsPermutation().indices();
  for (int c = qr.rank(); c < design.cols(); ++c) {
    const int col = perm[c];
    msg += col == 0 ? " intercept" : " " + names[col - 1];
  }
  throw std::invalid_argument(msg);
}

PropensityFit irls_fit(const DesignData& d, const PropensityOptions& opt) {
  const int n = static_cast<int>(d.design.rows());
  const int p = static_cast<int>(d.design.cols());
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(p);
  Eigen::VectorXd y = d.treatment.cast<double>();

  PropensityFit fit;
  for (int it = 1; it <= opt.max_iterations; ++it) {
    Eigen::VectorXd eta = d.design * beta;
    Eigen::VectorXd mu(n), wgt(n);
    for (int i = 0; i < n; ++i) {
      mu[i] = logistic(eta[i]);
      wgt[i] = mu[i] * (1.0 - mu[i]);
    }
    Eigen::VectorXd grad = d.design.transpose() * (y - mu);
    fit.iterations = it;
    fit.grad_norm = grad.lpNorm<Eigen::Infinity>();
    if (fit.grad_norm <= opt.tol) {
      fit.converged = true;
      break;
    }
    Eigen::MatrixXd xtwx =
        d.design.transpose() * wgt.asDiagonal() * d.design;
    beta += xtwx.ldlt().solve(grad);
    if (beta.lpNorm<Eigen::Infinity>() > 1e4)
      throw std::runtime_error(
          "fit_logistic: divergence (perfect separation suspected)");
  }

  double ll = 0.0;
  Eigen::VectorXd eta = d.design * beta;
  for (int i = 0; i < n; ++i) ll += log_bern(d.treatment[i], eta[i]);
  fit.log_likelihood = ll;
  fit.model.beta = beta;
  fit.model.sigma = 0.0;
  fit.model.w_columns = d.columns;
  fit.model.center = d.center;
  fit.model.scale = d.scale;
  fit.model.covariate_names = d.names;
  return fit;
}

}  // namespace

double marginal_log_likelihood(const Eigen::VectorXd& beta, double sigma,
                               const Eigen::MatrixXd& design,
                               const Eigen::VectorXi& treatment,
                               const std::vector<std::vector<int>>& clusters,
                               int quadrature_nodes) {
  Eigen::VectorXd nodes, weights;
  gauss_hermite(quadrature_nodes, nodes, weights);
  Eigen::VectorXd eta = design * beta;
  double ll = 0.0;
  std::vector<double> logterm(quadrature_nodes);
  for (const auto& members : clusters) {
    for (int t = 0; t < quadrature_nodes; ++t) {
      const double b = kSqrt2 * nodes[t];
      double s = std::log(weights[t] / kSqrtPi);
      for (int i : members) s += log_bern(treatment[i], eta[i] + sigma * b);
      logterm[t] = s;
    }
    const double mx = *std::max_element(logterm.begin(), logterm.end());
    double acc = 0.0;
    for (double v : logterm) acc += std::exp(v - mx);
    ll += mx + std::log(acc);
  }
  return ll;
}

Eigen::VectorXd marginal_score(const Eigen::VectorXd& beta, double sigma,
                               const Eigen::MatrixXd& design,
                               const Eigen::VectorXi& treatment,
                               const std::vector<std::vector<int>>& clusters,
                               int quadrature_nodes) {
  Eigen::VectorXd nodes, weights;
  gauss_hermite(quadrature_nodes, nodes, weights);
  const int p = static_cast<int>(beta.size());
  Eigen::VectorXd eta = design * beta;
  Eigen::VectorXd score = Eigen::VectorXd::Zero(p + 1);
  std::vector<double> logterm(quadrature_nodes);
  Eigen::MatrixXd gbeta(p, quadrature_nodes);
  Eigen::VectorXd gsigma(quadrature_nodes);

  for (const auto& members : clusters) {
    for (int t = 0; t < quadrature_nodes; ++t) {
      const double b = kSqrt2 * nodes[t];
      double s = std::log(weights[t] / kSqrtPi);
      Eigen::VectorXd gb = Eigen::VectorXd::Zero(p);
      double gs = 0.0;
      for (int i : members) {
        const double e = eta[i] + sigma * b;
        s += log_bern(treatment[i], e);
        const double resid = treatment[i] - logistic(e);
        gb += resid * design.row(i).transpose();
        gs += resid * b;
      }
      logterm[t] = s;
      gbeta.col(t) = gb;
      gsigma[t] = gs;
    }
    const double mx = *std::max_element(logterm.begin(), logterm.end());
    double denom = 0.0;
    Eigen::VectorXd num = Eigen::VectorXd::Zero(p + 1);
    for (int t = 0; t < quadrature_nodes; ++t) {
      const double c = std::exp(logterm[t] - mx);
      denom += c;
      num.head(p) += c * gbeta.col(t);
      num[p] += c * gsigma[t];
    }
    score += num / denom;
  }
  return score;
}

namespace {

// BFGS on (beta, log sigma) for the marginal likelihood.
PropensityFit marginal_fit(const DesignData& d, const PropensityOptions& opt) {
  const int p = static_cast<int>(d.design.cols());
  const int dim = p + 1;
  Eigen::VectorXd theta = Eigen::VectorXd::Zero(dim);
  theta[p] = std::log(0.5);

  auto negloglik = [&](const Eigen::VectorXd& th) {
    return -marginal_log_likelihood(th.head(p), std::exp(th[p]), d.design,
                                    d.treatment, d.clusters,
                                    opt.quadrature_nodes);
  };
  auto neggrad = [&](const Eigen::VectorXd& th) {
    const double sigma = std::exp(th[p]);
    Eigen::VectorXd s = marginal_score(th.head(p), sigma, d.design, d.treatment,
                                       d.clusters, opt.quadrature_nodes);
    s[p] *= sigma;  // chain rule for log-sigma
    return Eigen::VectorXd(-s);
  };

  Eigen::MatrixXd hinv = Eigen::MatrixXd::Identity(dim, dim);
  double f = negloglik(theta);
  Eigen::VectorXd g = neggrad(theta);
  PropensityFit fit;
  const int max_iter = std::max(opt.max_iterations, 200);
  for (int it = 1; it <= max_iter; ++it) {
    fit.iterations = it;
    fit.grad_norm = g.lpNorm<Eigen::Infinity>();
    if (fit.grad_norm <= std::max(opt.tol, 1e-6)) {
      fit.converged = true;
      break;
    }
    Eigen::VectorXd dir = -(hinv * g);
    if (dir.dot(g) >= 0.0) dir = -g;  // reset on loss of descent
    double step = 1.0;
    Eigen::VectorXd theta_new;
    double f_new = f;
    for (int ls = 0; ls < 40; ++ls) {
      theta_new = theta + step * dir;
      f_new = negloglik(theta_new);
      if (f_new <= f + 1e-4 * step * g.dot(dir)) break;
      step *= 0.5;
    }
    Eigen::VectorXd g_new = neggrad(theta_new);
    Eigen::VectorXd s = theta_new - theta;
    Eigen::VectorXd y = g_new - g;
    const double sy = s.dot(y);
    if (sy > 1e-12) {
      const double rho = 1.0 / sy;
      Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(dim, dim);
      hinv = (eye - rho * s * y.transpose()) * hinv *
                 (eye - rho * y * s.transpose()) +
             rho * s * s.transpose();
    }
    theta = theta_new;
    f = f_new;
    g = g_new;
    if (theta.head(p).lpNorm<Eigen::Infinity>() > 1e4)
      throw std::runtime_error(
          "fit_logistic: divergence (perfect separation suspected)");
  }

  fit.log_likelihood = -f;
  fit.model.beta = theta.head(p);
  fit.model.sigma = std::exp(theta[p]);
  fit.model.w_columns = d.columns;
  fit.model.center = d.center;
  fit.model.scale = d.scale;
  fit.model.covariate_names = d.names;
  return fit;
}

}  // namespace

PropensityFit fit_logistic(const BipartiteDataset& ds,
                           const ClusterPartition& part,
                           const PropensityOptions& options) {
  DesignData d = build_design(ds, part, options.w_columns);
  int treated = 0;
  for (int i = 0; i < d.treatment.size(); ++i) treated += d.treatment[i];
  if (treated == 0 || treated == d.treatment.size())
    throw std::runtime_error(
        "fit_logistic: all units share one treatment level (separation)");
  check_rank(d.design, d.names);
  return options.random_intercept ? marginal_fit(d, options)
                                  : irls_fit(d, options);
}

double log_cluster_probability(const LogisticModel& model,
                               const BipartiteDataset& ds,
                               const ClusterPartition& part, int k,
                               int quadrature_nodes) {
  if (k < 0 || k >= part.num_clusters)
    throw std::out_of_range("log_cluster_probability: unknown cluster");
  std::vector<int> members;
  for (int i = 0; i < ds.num_interventional(); ++i)
    if (part.interventional_cluster[i] == k) members.push_back(i);

  auto eta_of = [&](int i) {
    const auto& u = ds.interventional[i];
    double eta = model.beta[0];
    for (int c = 0; c < model.center.size(); ++c)
      eta += model.beta[c + 1] *
             (u.covariates[model.w_columns[c]] - model.center[c]) /
             model.scale[c];
    return eta;
  };
  auto a_of = [&](int i) {
    const auto& u = ds.interventional[i];
    if (!u.treatment)
      throw std::runtime_error("log_cluster_probability: unobserved treatment");
    return *u.treatment;
  };

  if (model.sigma == 0.0) {
    double ll = 0.0;
    for (int i : members) ll += log_bern(a_of(i), eta_of(i));
    return ll;
  }

  // Adaptive Gauss-Hermite: recenter the rule at the mode of the integrand
  // and rescale by its curvature, so the estimate is converged well before
  // 21 nodes even for sigma ~ 2.
  const double sigma = model.sigma;
  auto grad = [&](double b, double& g1, double& g2) {
    g1 = -b;
    g2 = -1.0;
    for (int i : members) {
      const double p = 1.0 / (1.0 + std::exp(-(eta_of(i) + sigma * b)));
      g1 += sigma * (a_of(i) - p);
      g2 -= sigma * sigma * p * (1.0 - p);
    }
  };
  double mode = 0.0, g1 = 0.0, g2 = -1.0;
  for (int it = 0; it < 100; ++it) {
    grad(mode, g1, g2);
    const double step = g1 / g2;
    mode -= step;
    if (std::abs(step) < 1e-13) break;
  }
  grad(mode, g1, g2);
  const double tau = 1.0 / std::sqrt(-g2);

  Eigen::VectorXd nodes, weights;
  gauss_hermite(quadrature_nodes, nodes, weights);
  std::vector<double> logterm(quadrature_nodes);
  for (int t = 0; t < quadrature_nodes; ++t) {
    const double b = mode + kSqrt2 * tau * nodes[t];
    double s = std::log(weights[t]) + nodes[t] * nodes[t] - 0.5 * b * b;
    for (int i : members) s += log_bern(a_of(i), eta_of(i) + sigma * b);
    logterm[t] = s;
  }
  const double mx = *std::max_element(logterm.begin(), logterm.end());
  double acc = 0.0;
  for (double v : logterm) acc += std::exp(v - mx);
  // Jacobian sqrt(2) tau over the standard-normal constant sqrt(2 pi).
  return mx + std::log(acc) + std::log(tau) - std::log(kSqrtPi);
}

double log_cluster_probability_known(const std::vector<double>& probs,
                                     const std::vector<int>& treatments) {
  if (probs.size() != treatments.size())
    throw std::invalid_argument("log_cluster_probability_known: size mismatch");
  double ll = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i)
    ll += treatments[i] ? std::log(probs[i]) : std::log1p(-probs[i]);
  return ll;
}

PositivityReport positivity_diagnostics(
    const std::vector<double>& log_denominators,
    const std::vector<std::vector<int>>& cluster_treatments,
    const std::vector<double>& alpha_grid, double threshold) {
  PositivityReport rep;
  rep.threshold = threshold;
  const int K = static_cast<int>(log_denominators.size());
  rep.weights.resize(K);
  for (int k = 0; k < K; ++k) {
    rep.weights[k].resize(alpha_grid.size());
    const auto& a = cluster_treatments[k];
    for (std::size_t g = 0; g < alpha_grid.size(); ++g) {
      const double alpha = alpha_grid[g];
      double lognum = 0.0;
      for (int ai : a) lognum += ai ? std::log(alpha) : std::log1p(-alpha);
      const double w = std::exp(lognum - log_denominators[k]);
      rep.weights[k][g] = w;
      if (w > threshold) rep.flags.push_back({k, alpha, w});
    }
  }
  return rep;
}

}  // namespace bci
