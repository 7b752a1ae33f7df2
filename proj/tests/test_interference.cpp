#include "doctest.h"

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include "bci/interference.hpp"

using namespace bci;

namespace {

// Small reference mappings used throughout: (a) one upwind plant per outcome
// unit, (b) two non-overlapping blocks, (c) overlapping interference sets.
InterferenceMapping map_a() {
  return build_mapping(4, 3, {{0, 0}, {1, 0}, {2, 1}, {3, 2}});
}
InterferenceMapping map_b() {
  return build_mapping(4, 3, {{0, 0}, {0, 1}, {1, 0}, {1, 1}, {2, 2}, {3, 2}});
}
InterferenceMapping map_c() {
  return build_mapping(4, 3,
                       {{0, 0}, {0, 1}, {1, 0}, {1, 1}, {2, 1}, {3, 1}, {3, 2}});
}

// Relabels units by the given permutations and rebuilds the mapping.
InterferenceMapping permuted(const InterferenceMapping& m,
                             const std::vector<int>& pj,
                             const std::vector<int>& pi) {
  std::vector<std::pair<int, int>> edges;
  for (int j = 0; j < m.num_outcome; ++j)
    for (int i : m.rows[j]) edges.emplace_back(pj[j], pi[i]);
  return build_mapping(m.num_outcome, m.num_interventional, edges);
}

}  // namespace

TEST_CASE("build_mapping produces sorted dual adjacency") {
  auto m = map_c();
  CHECK(m.rows[0] == std::vector<int>{0, 1});
  CHECK(m.rows[1] == std::vector<int>{0, 1});
  CHECK(m.rows[2] == std::vector<int>{1});
  CHECK(m.rows[3] == std::vector<int>{1, 2});
  CHECK(interference_set(m, 0) == std::vector<int>{0, 1});
  CHECK(downwind_set(m, 1) == std::vector<int>{0, 1, 2, 3});
  CHECK(downwind_set(map_a(), 2) == std::vector<int>{3});
}

TEST_CASE("duplicate edges are deduplicated") {
  auto m = build_mapping(1, 2, {{0, 1}, {0, 1}, {0, 0}});
  CHECK(m.rows[0] == std::vector<int>{0, 1});
  CHECK(m.cols[1] == std::vector<int>{0});
}

TEST_CASE("build_mapping rejects bad input") {
  CHECK_THROWS_AS(build_mapping(4, 3, {{4, 0}}), std::out_of_range);
  CHECK_THROWS_AS(build_mapping(4, 3, {{0, 3}}), std::out_of_range);
  // Outcome unit 1 has an empty interference set; the error names it.
  try {
    build_mapping(2, 1, {{0, 0}});
    FAIL("expected invalid_argument");
  } catch (const std::invalid_argument& e) {
    CHECK(std::string(e.what()).find("1") != std::string::npos);
  }
}

TEST_CASE("rows/cols duality holds exhaustively") {
  for (const auto& m : {map_a(), map_b(), map_c()}) {
    for (int j = 0; j < m.num_outcome; ++j)
      for (int i = 0; i < m.num_interventional; ++i) {
        const bool in_row = std::binary_search(m.rows[j].begin(),
                                               m.rows[j].end(), i);
        const bool in_col = std::binary_search(m.cols[i].begin(),
                                               m.cols[i].end(), j);
        CHECK(in_row == in_col);
      }
  }
}

TEST_CASE("structure classification of the three reference maps") {
  auto a = classify_structure(map_a());
  CHECK(a.kind == StructureKind::ClusteredNoInterference);
  REQUIRE(a.partition.has_value());
  CHECK(a.partition->num_clusters == 3);

  auto b = classify_structure(map_b());
  CHECK(b.kind == StructureKind::PartialInterference);
  REQUIRE(b.partition.has_value());
  CHECK(b.partition->num_clusters == 2);
  CHECK(check_partial_against_partition(map_b(), *b.partition).ok);

  auto c = classify_structure(map_c());
  CHECK(c.kind == StructureKind::General);
  CHECK(!c.partition.has_value());
}

TEST_CASE("classification is invariant under unit relabeling") {
  std::vector<int> pj = {0, 1, 2, 3}, pi = {0, 1, 2};
  for (const auto& m : {map_a(), map_b(), map_c()}) {
    const auto base = classify_structure(m).kind;
    std::vector<int> qj = pj;
    do {
      std::vector<int> qi = pi;
      do {
        CHECK(classify_structure(permuted(m, qj, qi)).kind == base);
      } while (std::next_permutation(qi.begin(), qi.end()));
    } while (std::next_permutation(qj.begin(), qj.end()));
  }
}

TEST_CASE("isolated plants get singleton clusters") {
  // Plant 2 has no downwind outcomes.
  auto m = build_mapping(2, 3, {{0, 0}, {1, 1}});
  auto c = classify_structure(m);
  CHECK(c.kind == StructureKind::ClusteredNoInterference);
  REQUIRE(c.partition.has_value());
  CHECK(c.partition->num_clusters == 3);
  CHECK(check_partial_against_partition(m, *c.partition).ok);
}

TEST_CASE("check_partial_against_partition rejects mismatched blocks") {
  // Any 2-block partition of the overlapping map has violations.
  ClusterPartition p1{{0, 0, 1}, {0, 0, 0, 1}, 2};
  auto r1 = check_partial_against_partition(map_c(), p1);
  CHECK(!r1.ok);
  CHECK(!r1.violations.empty());

  ClusterPartition p2{{0, 1, 1}, {0, 0, 1, 1}, 2};
  CHECK(!check_partial_against_partition(map_c(), p2).ok);

  // Merging the no-interference map into one block fails: rows are strict
  // subsets of the block.
  ClusterPartition merged{{0, 0, 0}, {0, 0, 0, 0}, 1};
  CHECK(!check_partial_against_partition(map_a(), merged).ok);
}

TEST_CASE("key assignment picks the closest upwind plant") {
  BipartiteDataset ds;
  ds.interventional = {
      {"p1", GeoPoint{40.0, -100.0}, {}, {}},
      {"p2", GeoPoint{40.0, -99.0}, {}, {}},
      {"p3", GeoPoint{42.0, -100.0}, {}, {}},
  };
  ds.outcome = {
      {"m1", GeoPoint{40.0, -99.9}, {}, {}},   // closest to p1
      {"m2", GeoPoint{40.0, -99.1}, {}, {}},   // closest to p2
      {"m3", GeoPoint{42.0, -100.0}, {}, {}},  // T = {2} singleton
      {"m4", GeoPoint{40.0, -99.5}, {}, {}},   // equidistant p1/p2 -> p1
  };
  auto m = build_mapping(
      4, 3, {{0, 0}, {0, 1}, {1, 0}, {1, 1}, {2, 2}, {3, 0}, {3, 1}});
  auto keys = assign_key_associated(m, ds);
  CHECK(keys == std::vector<int>{0, 1, 2, 0});

  ds.outcome[0].location.reset();
  CHECK_THROWS_AS(assign_key_associated(m, ds), std::runtime_error);
}
