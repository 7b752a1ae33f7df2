#include "doctest.h"

#include <cmath>
#include <random>
#include <stdexcept>

#include "bci/oracle.hpp"

using namespace bci;

namespace {

InterferenceMapping map_b() {
  return build_mapping(4, 3, {{0, 0}, {0, 1}, {1, 0}, {1, 1}, {2, 2}, {3, 2}});
}
InterferenceMapping map_c() {
  return build_mapping(4, 3,
                       {{0, 0}, {0, 1}, {1, 0}, {1, 1}, {2, 1}, {3, 1}, {3, 2}});
}

// Y_j = number of treated units in T_j.
PotentialOutcomeWorld count_world(const InterferenceMapping& m) {
  std::vector<double> c(m.num_outcome, 0.0);
  std::vector<std::vector<double>> b;
  for (const auto& row : m.rows) b.emplace_back(row.size(), 1.0);
  return PotentialOutcomeWorld::linear(m, std::move(c), std::move(b));
}

// Random linear world for closed-form comparisons.
PotentialOutcomeWorld random_linear(const InterferenceMapping& m,
                                    std::vector<double>& c,
                                    std::vector<std::vector<double>>& b,
                                    std::uint64_t seed) {
  std::mt19937_64 eng(seed);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  c.resize(m.num_outcome);
  b.resize(m.num_outcome);
  for (int j = 0; j < m.num_outcome; ++j) {
    c[j] = u(eng);
    b[j].resize(m.rows[j].size());
    for (double& v : b[j]) v = u(eng);
  }
  return PotentialOutcomeWorld::linear(m, c, b);
}

}  // namespace

TEST_CASE("unit-level average potential outcome on the overlapping map") {
  auto w = count_world(map_c());
  auto v = ind_avg_po(w, 0, 0, 1, {0.5});
  CHECK(v.exact());
  CHECK(std::abs(v.value - 1.5) < 1e-12);
  CHECK(std::abs(ind_avg_po(w, 0, 0, 0, {0.0}).value) < 1e-12);
  // Singleton interference set: the complement is empty, alpha is irrelevant.
  for (double alpha : {0.0, 0.3, 1.0})
    CHECK(std::abs(ind_avg_po(w, 2, 1, 1, {alpha}).value - 1.0) < 1e-12);

  CHECK_THROWS_AS(ind_avg_po(w, 2, 0, 1, {0.5}), std::invalid_argument);
}

TEST_CASE("unit-level direct and indirect effects") {
  auto w = count_world(map_c());
  CHECK(std::abs(de_ij(w, 0, 0, {0.5}).value - 1.0) < 1e-12);
  CHECK(std::abs(ie_ij(w, 0, 0, 0, {0.6}, {0.2}).value - 0.4) < 1e-12);

  auto zero = ie_ij(w, 0, 0, 0, {0.4}, {0.4});
  CHECK(zero.value == 0.0);
  CHECK(zero.mc_se == 0.0);
}

TEST_CASE("interference-set averages") {
  auto w = count_world(map_c());
  CHECK(std::abs(de_j(w, 0, {0.3}).value - 1.0) < 1e-12);
  // T_3 = {1, 2}: at the point mass alpha = 0 each term is 1 + 0.
  CHECK(std::abs(m_indexed_po(w, 3, 1, {0.0}).value - 1.0) < 1e-12);
  CHECK(ie_j(w, 1, 1, {0.7}, {0.7}).value == 0.0);
}

TEST_CASE("direct-effect decomposition identity") {
  std::vector<double> c;
  std::vector<std::vector<double>> b;
  auto w = random_linear(map_c(), c, b, 5);
  for (int j = 0; j < 4; ++j) {
    const auto& tj = w.mapping().rows[j];
    double acc = 0.0;
    for (int i : tj) acc += de_ij(w, j, i, {0.35}).value;
    acc /= static_cast<double>(tj.size());
    CHECK(std::abs(de_j(w, j, {0.35}).value - acc) < 1e-12);
  }
}

TEST_CASE("linear world closed forms hold to 1e-12") {
  std::vector<double> c;
  std::vector<std::vector<double>> b;
  auto w = random_linear(map_c(), c, b, 17);
  for (double alpha : {0.0, 0.25, 0.6, 1.0}) {
    for (int j = 0; j < 4; ++j) {
      const auto& tj = w.mapping().rows[j];
      for (std::size_t pos = 0; pos < tj.size(); ++pos) {
        double rest = 0.0;
        for (std::size_t q = 0; q < tj.size(); ++q)
          if (q != pos) rest += b[j][q];
        for (int a : {0, 1}) {
          const double expect = c[j] + b[j][pos] * a + alpha * rest;
          CHECK(std::abs(ind_avg_po(w, j, tj[pos], a, {alpha}).value - expect) <
                1e-12);
        }
        CHECK(std::abs(de_ij(w, j, tj[pos], {alpha}).value - b[j][pos]) < 1e-12);
        CHECK(std::abs(ie_ij(w, j, tj[pos], 1, {alpha}, {0.1}).value -
                       (alpha - 0.1) * rest) < 1e-12);
      }
    }
  }
}

TEST_CASE("degenerate strategies reduce to single potential outcomes") {
  std::vector<double> c;
  std::vector<std::vector<double>> b;
  auto w = random_linear(map_c(), c, b, 23);
  for (int j = 0; j < 4; ++j) {
    const auto& tj = w.mapping().rows[j];
    const std::uint64_t full = (std::uint64_t{1} << tj.size()) - 1;
    for (std::size_t pos = 0; pos < tj.size(); ++pos) {
      // alpha = 0: everyone else untreated; alpha = 1: everyone else treated.
      const std::uint64_t lone = std::uint64_t{1} << pos;
      CHECK(ind_avg_po(w, j, tj[pos], 1, {0.0}).value == w.outcome(j, lone));
      CHECK(ind_avg_po(w, j, tj[pos], 0, {1.0}).value ==
            w.outcome(j, full & ~lone));
    }
  }
}

TEST_CASE("key-associated population effects") {
  auto w = count_world(map_c());
  const std::vector<int> keys = {0, 0, 1, 1};
  for (double alpha : {0.2, 0.5, 0.9}) {
    auto eff = key_population_effects(w, keys, 0, {alpha}, {alpha}, {});
    CHECK(std::abs(eff.de.value - 1.0) < 1e-12);
    CHECK(eff.ie.value == 0.0);
  }
  // Constant world: both effects vanish.
  std::vector<std::vector<double>> zero;
  for (const auto& row : map_c().rows) zero.emplace_back(row.size(), 0.0);
  auto flat = PotentialOutcomeWorld::linear(map_c(), {7, 7, 7, 7}, zero);
  auto eff = key_population_effects(flat, keys, 1, {0.6}, {0.3}, {});
  CHECK(eff.de.value == 0.0);
  CHECK(eff.ie.value == 0.0);
}

TEST_CASE("cluster effects on the block map") {
  auto m = map_b();
  auto w = count_world(m);
  ClusterPartition part{{0, 0, 1}, {0, 0, 1, 1}, 2};
  const std::vector<int> keys = {0, 1, 2, 2};
  auto eff = cluster_effects(w, part, keys, 0, {0.5}, {0.5}, {});
  // Key treated plus one Bernoulli(1/2) neighbor.
  CHECK(std::abs(eff.ybar_treated[0] - 1.5) < 1e-12);
  CHECK(std::abs(eff.ybar_control[0] - 0.5) < 1e-12);
  CHECK(std::abs(eff.ybar_treated[1] - 1.0) < 1e-12);
  CHECK(std::abs(eff.de[0] - 1.0) < 1e-12);
  CHECK(std::abs(eff.pop_de - (eff.de[0] + eff.de[1]) / 2.0) < 1e-15);
  CHECK(std::abs(population_avg_po(w, part, keys, 1, {0.5}) -
                 (eff.ybar_treated[0] + eff.ybar_treated[1]) / 2.0) < 1e-15);

  // The overlapping map admits no valid block partition.
  ClusterPartition bad{{0, 0, 1}, {0, 0, 0, 1}, 2};
  CHECK_THROWS_AS(cluster_effects(count_world(map_c()), bad, keys, 0, {0.5},
                                  {0.5}, {}),
                  std::invalid_argument);
}

TEST_CASE("single-cluster population effects equal cluster effects") {
  auto m = build_mapping(2, 2, {{0, 0}, {0, 1}, {1, 0}, {1, 1}});
  auto w = count_world(m);
  ClusterPartition part{{0, 0}, {0, 0}, 1};
  auto eff = cluster_effects(w, part, {0, 1}, 1, {0.4}, {0.2}, {});
  CHECK(eff.pop_de == eff.de[0]);
  CHECK(eff.pop_ie == eff.ie[0]);
}

TEST_CASE("structured dependence verification") {
  auto m = map_b();
  auto w = count_world(m);
  auto fn = [&](int j, const std::vector<std::uint8_t>& a) {
    return w.outcome_global(j, a);
  };
  CHECK(verify_structured_sutva(m, fn).ok);

  // Planted violation: outcome 0 reads plant 2, which is outside T_0.
  auto bad = [&](int j, const std::vector<std::uint8_t>& a) {
    double y = w.outcome_global(j, a);
    if (j == 0) y += a[2];
    return y;
  };
  auto check = verify_structured_sutva(m, bad);
  CHECK(!check.ok);
  CHECK(check.j == 0);
  CHECK(bad(check.j, check.a) != bad(check.j, check.a2));

  auto sampled = verify_structured_sutva_sampled(m, bad, 64, 3);
  CHECK(!sampled.ok);
}

TEST_CASE("sampled fallback agrees with the closed form beyond the cap") {
  // 22 upwind plants: the 21-dimensional complement exceeds the default cap.
  const int p = 22;
  std::vector<std::pair<int, int>> edges;
  for (int i = 0; i < p; ++i) edges.emplace_back(0, i);
  auto m = build_mapping(1, p, edges);
  auto w = count_world(m);
  EnumerationPolicy policy;
  policy.samples = 40000;
  policy.seed = 77;
  auto v = ind_avg_po(w, 0, 0, 1, {0.3}, policy);
  CHECK(!v.exact());
  CHECK(v.mc_se > 0.0);
  const double expect = 1.0 + 0.3 * (p - 1);
  CHECK(std::abs(v.value - expect) < 4.0 * v.mc_se);
}
