#include "bci/interference.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <stdexcept>

namespace bci {

InterferenceMapping build_mapping(
    int M, int P, const std::vector<std::pair<int, int>>& edges) {
  InterferenceMapping map;
  map.num_outcome = M;
  map.num_interventional = P;
  map.rows.resize(M);
  map.cols.resize(P);
  for (const auto& [j, i] : edges) {
    if (j < 0 || j >= M)
      throw std::out_of_range("build_mapping: outcome index " +
                              std::to_string(j) + " out of range");
    if (i < 0 || i >= P)
      throw std::out_of_range("build_mapping: interventional index " +
                              std::to_string(i) + " out of range");
    map.rows[j].push_back(i);
  }
  for (int j = 0; j < M; ++j) {
    auto& r = map.rows[j];
    std::sort(r.begin(), r.end());
    r.erase(std::unique(r.begin(), r.end()), r.end());
    if (r.empty())
      throw std::invalid_argument("build_mapping: outcome unit " +
                                  std::to_string(j) +
                                  " has an empty interference set");
    for (int i : r) map.cols[i].push_back(j);
  }
  return map;
}

const std::vector<int>& interference_set(const InterferenceMapping& map, int j) {
  if (j < 0 || j >= map.num_outcome)
    throw std::out_of_range("interference_set: index out of range");
  return map.rows[j];
}

const std::vector<int>& downwind_set(const InterferenceMapping& map, int i) {
  if (i < 0 || i >= map.num_interventional)
    throw std::out_of_range("downwind_set: index out of range");
  return map.cols[i];
}

StructureClass classify_structure(const InterferenceMapping& map) {
  // Rows are equal-or-disjoint iff grouping rows by content yields groups
  // such that each interventional unit appears in rows of one group only.
  std::map<std::vector<int>, int> group_of_row;
  std::vector<int> row_group(map.num_outcome, -1);
  for (int j = 0; j < map.num_outcome; ++j) {
    auto [it, inserted] = group_of_row.try_emplace(
        map.rows[j], static_cast<int>(group_of_row.size()));
    row_group[j] = it->second;
  }
  bool equal_or_disjoint = true;
  for (int i = 0; i < map.num_interventional && equal_or_disjoint; ++i) {
    const auto& dw = map.cols[i];
    for (std::size_t t = 1; t < dw.size(); ++t) {
      if (row_group[dw[t]] != row_group[dw[0]]) {
        equal_or_disjoint = false;
        break;
      }
    }
  }

  StructureClass out;
  if (!equal_or_disjoint) {
    out.kind = StructureKind::General;
    return out;
  }

  bool all_singleton = true;
  for (const auto& r : map.rows)
    if (r.size() > 1) all_singleton = false;
  out.kind = all_singleton ? StructureKind::ClusteredNoInterference
                           : StructureKind::PartialInterference;

  // Induced partition: one cluster per distinct row, renumbered by first
  // appearance; isolated interventional units appended as singleton clusters.
  ClusterPartition part;
  part.outcome_cluster.assign(map.num_outcome, -1);
  part.interventional_cluster.assign(map.num_interventional, -1);
  std::vector<int> renumber(group_of_row.size(), -1);
  int next = 0;
  for (int j = 0; j < map.num_outcome; ++j) {
    int& g = renumber[row_group[j]];
    if (g < 0) g = next++;
    part.outcome_cluster[j] = g;
  }
  for (int j = 0; j < map.num_outcome; ++j)
    for (int i : map.rows[j]) part.interventional_cluster[i] = part.outcome_cluster[j];
  for (int i = 0; i < map.num_interventional; ++i)
    if (part.interventional_cluster[i] < 0) part.interventional_cluster[i] = next++;
  part.num_clusters = next;
  out.partition = std::move(part);
  return out;
}

PartialCheck check_partial_against_partition(const InterferenceMapping& map,
                                             const ClusterPartition& part) {
  PartialCheck out;
  out.ok = true;
  const auto plants = part.interventional_members();
  for (int j = 0; j < map.num_outcome; ++j) {
    const int k = part.outcome_cluster[j];
    const auto& expected = plants[k];
    if (map.rows[j] == expected) continue;
    out.ok = false;
    // Name the offending units: set difference both ways.
    std::vector<int> diff;
    std::set_symmetric_difference(map.rows[j].begin(), map.rows[j].end(),
                                  expected.begin(), expected.end(),
                                  std::back_inserter(diff));
    for (int i : diff) out.violations.emplace_back(j, i);
  }
  return out;
}

std::vector<int> assign_key_associated(const InterferenceMapping& map,
                                       const BipartiteDataset& ds) {
  if (ds.num_outcome() != map.num_outcome ||
      ds.num_interventional() != map.num_interventional)
    throw std::invalid_argument("assign_key_associated: dimension mismatch");
  std::vector<int> keys(map.num_outcome, -1);
  for (int j = 0; j < map.num_outcome; ++j) {
    const auto& mj = ds.outcome[j];
    if (!mj.location)
      throw std::runtime_error("assign_key_associated: outcome unit " + mj.id +
                               " has no location");
    double best = std::numeric_limits<double>::infinity();
    for (int i : map.rows[j]) {
      const auto& pi = ds.interventional[i];
      if (!pi.location)
        throw std::runtime_error("assign_key_associated: interventional unit " +
                                 pi.id + " has no location");
      const double d = haversine_km(*mj.location, *pi.location);
      if (d < best) {  // strict: ties keep the lowest index (rows sorted)
        best = d;
        keys[j] = i;
      }
    }
  }
  return keys;
}

}  // namespace bci
