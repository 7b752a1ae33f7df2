#include "doctest.h"

#include <cmath>
#include <stdexcept>

#include "bci/iptw.hpp"

using namespace bci;

namespace {

// Single cluster: plants {p1, p2}, one outcome unit keyed to p1, observed
// A = (1, 0), Y = 5, unit propensities (1/2, 1/2).
IptwData toy_cluster() {
  IptwData d;
  d.cluster_plants = {{0, 1}};
  d.cluster_outcomes = {{0}};
  d.keys = {0};
  d.treatments = {1, 0};
  d.outcomes = {5.0};
  d.log_denominators = {std::log(0.25)};
  return d;
}

InterferenceMapping toy_mapping() {
  return build_mapping(1, 2, {{0, 0}, {0, 1}});
}

}  // namespace

TEST_CASE("hand-computed single-cluster estimate") {
  auto d = toy_cluster();
  auto c = cluster_estimate(d, 0, 1, 0.5);
  CHECK(c.value == 10.0);
  CHECK(c.max_weight == 2.0);
  CHECK(c.units_used == 1);

  // Key treatment does not match the requested level.
  auto miss = cluster_estimate(d, 0, 0, 0.5);
  CHECK(miss.value == 0.0);
  CHECK(miss.units_used == 0);
}

TEST_CASE("denominator matching the strategy leaves only the key factor") {
  // Three units all treated, key treated, denominator = alpha^3. The
  // numerator omits the key, so every weight is 1/alpha.
  IptwData d;
  d.cluster_plants = {{0, 1, 2}};
  d.cluster_outcomes = {{0, 1}};
  d.keys = {0, 2};
  d.treatments = {1, 1, 1};
  d.outcomes = {4.0, 6.0};
  const double alpha = 0.3;
  d.log_denominators = {3.0 * std::log(alpha)};
  auto c = cluster_estimate(d, 0, 1, alpha);
  CHECK(std::abs(c.max_weight - 1.0 / alpha) < 1e-12);
  CHECK(std::abs(c.value - 5.0 / alpha) < 1e-12);
}

TEST_CASE("degenerate strategies") {
  auto d = toy_cluster();
  // alpha = 0: the complement (p2 untreated) has probability 1.
  auto c0 = cluster_estimate(d, 0, 1, 0.0);
  CHECK(c0.value == doctest::Approx(4.0 * 5.0));
  // alpha = 1: the complement has probability 0.
  auto c1 = cluster_estimate(d, 0, 1, 1.0);
  CHECK(c1.value == 0.0);
}

TEST_CASE("population estimate variance and CI") {
  auto est = population_estimate({8.0, 12.0});
  CHECK(est.point == 10.0);
  CHECK(est.std_error == 2.0);
  CHECK(est.has_ci);
  CHECK(std::abs(est.ci_low - (10.0 - 2.0 * kWald975)) < 1e-12);
  CHECK(std::abs(est.ci_high - (10.0 + 2.0 * kWald975)) < 1e-12);
  CHECK(std::abs(est.ci_low - 6.080072) < 1e-6);
  CHECK(std::abs(est.ci_high - 13.919928) < 1e-6);

  auto flat = population_estimate({3.0, 3.0, 3.0});
  CHECK(flat.std_error == 0.0);
  CHECK(flat.ci_low == 3.0);
  CHECK(flat.ci_high == 3.0);

  auto single = population_estimate({5.0});
  CHECK(single.point == 5.0);
  CHECK(!single.has_ci);
}

TEST_CASE("paired-contrast effects") {
  auto de = contrast_estimate({1.0, 3.0});
  CHECK(de.point == 2.0);
  CHECK(de.std_error == 1.0);
}

TEST_CASE("estimate_all on the toy cluster") {
  auto d = toy_cluster();
  ClusterPartition part{{0, 0}, {0}, 1};
  EstimatorConfig cfg;
  cfg.alpha_grid = {0.5};
  auto rep = estimate_all(d, toy_mapping(), part, cfg);
  REQUIRE(rep.ybar.size() == 2);
  CHECK(rep.ybar[1].a == 1);
  CHECK(rep.ybar[1].estimate.point == 10.0);
  CHECK(rep.ybar[0].estimate.point == 0.0);
  REQUIRE(rep.effects.size() == 1);
  CHECK(rep.effects[0].estimand == "DE");
  CHECK(rep.effects[0].estimate.point == 10.0);
}

TEST_CASE("identical allocation strategies give an exactly zero IE") {
  auto d = toy_cluster();
  ClusterPartition part{{0, 0}, {0}, 1};
  EstimatorConfig cfg;
  cfg.alpha_grid = {0.5, 0.5};
  cfg.a_level = 1;
  auto rep = estimate_all(d, toy_mapping(), part, cfg);
  bool found = false;
  for (const auto& row : rep.effects) {
    if (row.estimand != "IE") continue;
    found = true;
    CHECK(row.estimate.point == 0.0);
    CHECK(row.estimate.std_error == 0.0);
  }
  CHECK(found);
}

TEST_CASE("estimate_all validates its inputs") {
  auto d = toy_cluster();
  ClusterPartition part{{0, 0}, {0}, 1};
  EstimatorConfig cfg;
  CHECK_THROWS_AS(estimate_all(d, toy_mapping(), part, cfg),
                  std::invalid_argument);
  cfg.alpha_grid = {1.5};
  CHECK_THROWS_AS(estimate_all(d, toy_mapping(), part, cfg),
                  std::invalid_argument);

  // Partition that does not match the interference blocks.
  cfg.alpha_grid = {0.5};
  auto m = build_mapping(1, 2, {{0, 0}});
  CHECK_THROWS_AS(estimate_all(d, m, part, cfg), std::invalid_argument);
}

TEST_CASE("scale equivariance in the outcomes") {
  IptwData d;
  d.cluster_plants = {{0, 1}, {2, 3}};
  d.cluster_outcomes = {{0}, {1, 2}};
  d.keys = {0, 2, 3};
  d.treatments = {1, 0, 1, 1};
  d.outcomes = {5.0, -2.0, 3.5};
  d.log_denominators = {std::log(0.25), std::log(0.2)};
  ClusterPartition part{{0, 0, 1, 1}, {0, 1, 1}, 2};
  auto m = build_mapping(
      3, 4, {{0, 0}, {0, 1}, {1, 2}, {1, 3}, {2, 2}, {2, 3}});
  EstimatorConfig cfg;
  cfg.alpha_grid = {0.3, 0.7};
  auto base = estimate_all(d, m, part, cfg);

  const double c = -4.0;
  auto scaled = d;
  for (double& y : scaled.outcomes) y *= c;
  auto rep = estimate_all(scaled, m, part, cfg);
  for (std::size_t t = 0; t < base.ybar.size(); ++t) {
    CHECK(std::abs(rep.ybar[t].estimate.point - c * base.ybar[t].estimate.point) <
          1e-12);
    CHECK(std::abs(rep.ybar[t].estimate.std_error -
                   std::abs(c) * base.ybar[t].estimate.std_error) < 1e-12);
  }
  for (std::size_t t = 0; t < base.effects.size(); ++t) {
    CHECK(std::abs(rep.effects[t].estimate.point -
                   c * base.effects[t].estimate.point) < 1e-12);
    CHECK(std::abs(rep.effects[t].estimate.std_error -
                   std::abs(c) * base.effects[t].estimate.std_error) < 1e-12);
  }
}

TEST_CASE("truncation off reproduces untruncated results bit for bit") {
  auto d = toy_cluster();
  auto a = cluster_estimate(d, 0, 1, 0.5, std::nullopt);
  auto b = cluster_estimate(d, 0, 1, 0.5);
  CHECK(a.value == b.value);
  CHECK(a.max_weight == b.max_weight);

  // An active cap changes the extreme weight.
  auto capped = cluster_estimate(d, 0, 1, 0.5, 1.5);
  CHECK(capped.max_weight == 1.5);
  CHECK(capped.value == 7.5);
}

TEST_CASE("make_iptw_data pulls observations from the dataset") {
  BipartiteDataset ds;
  ds.interventional = {{"p1", {}, {}, 1}, {"p2", {}, {}, 0}};
  ds.outcome = {{"m1", {}, {}, 5.0}};
  ds.rebuild_index();
  ClusterPartition part{{0, 0}, {0}, 1};
  auto d = make_iptw_data(ds, part, {0}, std::vector<double>{std::log(0.25)});
  CHECK(cluster_estimate(d, 0, 1, 0.5).value == 10.0);

  ds.outcome[0].outcome.reset();
  CHECK_THROWS_AS(
      make_iptw_data(ds, part, {0}, std::vector<double>{std::log(0.25)}),
      std::runtime_error);
}
