#pragma once

#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "bci/geo.hpp"

namespace bci {

// Units where the intervention is applied (e.g., power plants).
struct InterventionalUnit {
  std::string id;
  std::optional<GeoPoint> location;
  std::vector<double> covariates;     // W_i
  std::optional<int> treatment;       // A_i in {0,1}
};

// Units where the outcome is measured (e.g., zip codes).
struct OutcomeUnit {
  std::string id;
  std::optional<GeoPoint> location;
  std::vector<double> covariates;     // X_j
  std::optional<double> outcome;      // Y_j
};

// Units are addressed by dense index in dataset order; ids only at I/O
// boundaries. Immutable once built.
struct BipartiteDataset {
  std::vector<InterventionalUnit> interventional;
  std::vector<OutcomeUnit> outcome;

  int num_interventional() const { return static_cast<int>(interventional.size()); }
  int num_outcome() const { return static_cast<int>(outcome.size()); }

  // id -> index; -1 if unknown. Maps built lazily by rebuild_index().
  int interventional_index(const std::string& id) const;
  int outcome_index(const std::string& id) const;
  void rebuild_index();

 private:
  std::unordered_map<std::string, int> interventional_by_id_;
  std::unordered_map<std::string, int> outcome_by_id_;
};

// Partition of both unit levels into clusters 0..K-1 (dense indices).
struct ClusterPartition {
  std::vector<int> interventional_cluster;  // size P
  std::vector<int> outcome_cluster;         // size M
  int num_clusters = 0;

  std::vector<std::vector<int>> interventional_members() const;
  std::vector<std::vector<int>> outcome_members() const;
};

struct Violation {
  std::string unit_id;
  std::string message;
};

// Empty report iff all dataset invariants hold. Violations are data, not
// failures.
std::vector<Violation> validate_dataset(const BipartiteDataset& ds);

// Partition consistency against a dataset: sizes, in-range clusters, each
// cluster nonempty at both levels.
std::vector<Violation> validate_partition(const BipartiteDataset& ds,
                                          const ClusterPartition& part);

struct ClusterView {
  std::vector<int> interventional_idx;          // dataset indices, ascending
  std::vector<int> outcome_idx;
  std::vector<int> treatments;                  // A^k
  std::vector<std::vector<double>> w;           // W^k rows
  std::vector<std::vector<double>> x;           // X^k rows
  std::vector<double> outcomes;                 // Y^k
};

// Throws std::out_of_range for unknown k, std::runtime_error when a
// treatment or outcome in cluster k is unobserved.
ClusterView cluster_view(const BipartiteDataset& ds,
                         const ClusterPartition& part, int k);

}  // namespace bci
