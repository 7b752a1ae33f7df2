#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "bci/data_model.hpp"

namespace bci {

// Sparse M x P binary relation. rows[j] is the interference set T_j
// (sorted ascending); cols[i] is the downwind view T_i^T. Both encode the
// same edge set. Immutable after build.
struct InterferenceMapping {
  int num_outcome = 0;        // M
  int num_interventional = 0; // P
  std::vector<std::vector<int>> rows;
  std::vector<std::vector<int>> cols;
};

// Edges are (outcome index j, interventional index i); duplicates are
// deduplicated. Throws std::out_of_range for bad indices and
// std::invalid_argument when some outcome unit ends up with an empty
// interference set (the offending j is named).
InterferenceMapping build_mapping(int M, int P,
                                  const std::vector<std::pair<int, int>>& edges);

const std::vector<int>& interference_set(const InterferenceMapping& map, int j);
const std::vector<int>& downwind_set(const InterferenceMapping& map, int i);

enum class StructureKind {
  ClusteredNoInterference,
  PartialInterference,
  General,
};

struct StructureClass {
  StructureKind kind = StructureKind::General;
  // Present when kind != General: connected components of the bipartite
  // graph. Interventional units with no downwind outcomes get singleton
  // clusters appended after the component clusters.
  std::optional<ClusterPartition> partition;
};

// ClusteredNoInterference iff every |T_j| = 1 and rows are equal-or-disjoint;
// PartialInterference iff rows are equal-or-disjoint with some |T_j| > 1;
// General otherwise.
StructureClass classify_structure(const InterferenceMapping& map);

struct PartialCheck {
  bool ok = false;
  std::vector<std::pair<int, int>> violations;  // (j, offending i)
};

// True iff for every outcome unit j in cluster k, T_j equals P^k exactly.
PartialCheck check_partial_against_partition(const InterferenceMapping& map,
                                             const ClusterPartition& part);

// keys[j] = member of T_j closest (great-circle) to outcome unit j; ties go
// to the lowest interventional index. Throws on missing locations.
std::vector<int> assign_key_associated(const InterferenceMapping& map,
                                       const BipartiteDataset& ds);

}  // namespace bci
