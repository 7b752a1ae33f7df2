#include "doctest.h"

#include <stdexcept>

#include "bci/data_model.hpp"

using namespace bci;

namespace {

BipartiteDataset toy_dataset() {
  BipartiteDataset ds;
  ds.interventional = {
      {"p1", GeoPoint{40.0, -100.0}, {1.0, 2.0}, 1},
      {"p2", GeoPoint{40.5, -100.5}, {0.5, -1.0}, 0},
  };
  ds.outcome = {
      {"m1", GeoPoint{40.2, -100.2}, {3.0}, 5.0},
      {"m2", GeoPoint{40.3, -100.1}, {1.5}, 7.0},
  };
  ds.rebuild_index();
  return ds;
}

}  // namespace

TEST_CASE("id index lookup") {
  auto ds = toy_dataset();
  CHECK(ds.interventional_index("p2") == 1);
  CHECK(ds.outcome_index("m1") == 0);
  CHECK(ds.interventional_index("nope") == -1);
  CHECK(ds.outcome_index("p1") == -1);
}

TEST_CASE("valid dataset has no violations") {
  CHECK(validate_dataset(toy_dataset()).empty());
}

TEST_CASE("validation flags bad coordinates and treatments") {
  auto ds = toy_dataset();
  ds.interventional[0].location = GeoPoint{95.0, 0.0};  // latitude out of range
  ds.interventional[1].treatment = 2;
  auto v = validate_dataset(ds);
  CHECK(v.size() == 2);
}

TEST_CASE("validation flags duplicate ids") {
  auto ds = toy_dataset();
  ds.interventional[1].id = "p1";
  ds.rebuild_index();
  CHECK(!validate_dataset(ds).empty());
}

TEST_CASE("partition validation") {
  auto ds = toy_dataset();
  ClusterPartition part{{0, 1}, {0, 1}, 2};
  CHECK(validate_partition(ds, part).empty());

  ClusterPartition bad{{0, 5}, {0, 1}, 2};
  CHECK(!validate_partition(ds, bad).empty());

  ClusterPartition empty_cluster{{0, 0}, {0, 0}, 2};  // cluster 1 empty
  CHECK(!validate_partition(ds, empty_cluster).empty());

  ClusterPartition wrong_size{{0}, {0, 1}, 2};
  CHECK(!validate_partition(ds, wrong_size).empty());
}

TEST_CASE("cluster members are ascending dataset indices") {
  ClusterPartition part{{1, 0, 1}, {0, 1, 1, 0}, 2};
  auto pm = part.interventional_members();
  auto om = part.outcome_members();
  REQUIRE(pm.size() == 2);
  CHECK(pm[0] == std::vector<int>{1});
  CHECK(pm[1] == std::vector<int>{0, 2});
  CHECK(om[0] == std::vector<int>{0, 3});
  CHECK(om[1] == std::vector<int>{1, 2});
}

TEST_CASE("cluster_view extracts one cluster") {
  auto ds = toy_dataset();
  ClusterPartition part{{0, 1}, {1, 0}, 2};
  auto v = cluster_view(ds, part, 1);
  CHECK(v.interventional_idx == std::vector<int>{1});
  CHECK(v.outcome_idx == std::vector<int>{0});
  CHECK(v.treatments == std::vector<int>{0});
  CHECK(v.outcomes == std::vector<double>{5.0});
  CHECK(v.w[0] == std::vector<double>{0.5, -1.0});

  CHECK_THROWS_AS(cluster_view(ds, part, 2), std::out_of_range);
}

TEST_CASE("cluster_view requires observed treatments and outcomes") {
  auto ds = toy_dataset();
  ds.interventional[0].treatment.reset();
  ClusterPartition part{{0, 0}, {0, 0}, 1};
  CHECK_THROWS_AS(cluster_view(ds, part, 0), std::runtime_error);
}
