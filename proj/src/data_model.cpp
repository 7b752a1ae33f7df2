#include "bci/data_model.hpp"

#include <cmath>
#include <set>
#include <stdexcept>

namespace bci {

void BipartiteDataset::rebuild_index() {
  interventional_by_id_.clear();
  outcome_by_id_.clear();
  for (int i = 0; i < num_interventional(); ++i)
    interventional_by_id_.emplace(interventional[i].id, i);
  for (int j = 0; j < num_outcome(); ++j)
    outcome_by_id_.emplace(outcome[j].id, j);
}

int BipartiteDataset::interventional_index(const std::string& id) const {
  auto it = interventional_by_id_.find(id);
  return it == interventional_by_id_.end() ? -1 : it->second;
}

int BipartiteDataset::outcome_index(const std::string& id) const {
  auto it = outcome_by_id_.find(id);
  return it == outcome_by_id_.end() ? -1 : it->second;
}

std::vector<std::vector<int>> ClusterPartition::interventional_members() const {
  std::vector<std::vector<int>> m(num_clusters);
  for (int i = 0; i < static_cast<int>(interventional_cluster.size()); ++i)
    m[interventional_cluster[i]].push_back(i);
  return m;
}

std::vector<std::vector<int>> ClusterPartition::outcome_members() const {
  std::vector<std::vector<int>> m(num_clusters);
  for (int j = 0; j < static_cast<int>(outcome_cluster.size()); ++j)
    m[outcome_cluster[j]].push_back(j);
  return m;
}

std::vector<Violation> validate_dataset(const BipartiteDataset& ds) {
  std::vector<Violation> out;
  if (ds.num_interventional() < 1)
    out.push_back({"", "dataset has no interventional units"});
  if (ds.num_outcome() < 1) out.push_back({"", "dataset has no outcome units"});

  std::set<std::string> seen;
  for (const auto& u : ds.interventional) {
    if (!seen.insert(u.id).second)
      out.push_back({u.id, "duplicate interventional id"});
  }
  seen.clear();
  for (const auto& u : ds.outcome) {
    if (!seen.insert(u.id).second) out.push_back({u.id, "duplicate outcome id"});
  }

  if (!ds.interventional.empty()) {
    const std::size_t d = ds.interventional.front().covariates.size();
    for (const auto& u : ds.interventional) {
      if (u.covariates.size() != d)
        out.push_back({u.id, "interventional covariate length mismatch"});
      if (u.treatment && *u.treatment != 0 && *u.treatment != 1)
        out.push_back({u.id, "treatment not in {0,1}"});
      if (u.location) {
        if (u.location->lat < -90.0 || u.location->lat > 90.0 ||
            u.location->lon < -180.0 || u.location->lon > 180.0)
          out.push_back({u.id, "location out of range"});
      }
    }
  }
  if (!ds.outcome.empty()) {
    const std::size_t d = ds.outcome.front().covariates.size();
    for (const auto& u : ds.outcome) {
      if (u.covariates.size() != d)
        out.push_back({u.id, "outcome covariate length mismatch"});
      if (u.outcome && !std::isfinite(*u.outcome))
        out.push_back({u.id, "outcome not finite"});
      if (u.location) {
        if (u.location->lat < -90.0 || u.location->lat > 90.0 ||
            u.location->lon < -180.0 || u.location->lon > 180.0)
          out.push_back({u.id, "location out of range"});
      }
    }
  }
  return out;
}

std::vector<Violation> validate_partition(const BipartiteDataset& ds,
                                          const ClusterPartition& part) {
  std::vector<Violation> out;
  if (static_cast<int>(part.interventional_cluster.size()) !=
      ds.num_interventional())
    out.push_back({"", "partition interventional size mismatch"});
  if (static_cast<int>(part.outcome_cluster.size()) != ds.num_outcome())
    out.push_back({"", "partition outcome size mismatch"});
  if (!out.empty()) return out;

  std::vector<int> np(part.num_clusters, 0), nm(part.num_clusters, 0);
  for (int i = 0; i < ds.num_interventional(); ++i) {
    const int k = part.interventional_cluster[i];
    if (k < 0 || k >= part.num_clusters)
      out.push_back({ds.interventional[i].id, "cluster index out of range"});
    else
      ++np[k];
  }
  for (int j = 0; j < ds.num_outcome(); ++j) {
    const int k = part.outcome_cluster[j];
    if (k < 0 || k >= part.num_clusters)
      out.push_back({ds.outcome[j].id, "cluster index out of range"});
    else
      ++nm[k];
  }
  for (int k = 0; k < part.num_clusters; ++k) {
    if (np[k] < 1)
      out.push_back({"", "cluster " + std::to_string(k) +
                             " has no interventional units"});
    if (nm[k] < 1)
      out.push_back({"", "cluster " + std::to_string(k) + " has no outcome units"});
  }
  return out;
}

ClusterView cluster_view(const BipartiteDataset& ds,
                         const ClusterPartition& part, int k) {
  if (k < 0 || k >= part.num_clusters)
    throw std::out_of_range("cluster_view: unknown cluster " +
                            std::to_string(k));
  ClusterView v;
  for (int i = 0; i < ds.num_interventional(); ++i) {
    if (part.interventional_cluster[i] != k) continue;
    const auto& u = ds.interventional[i];
    if (!u.treatment)
      throw std::runtime_error("cluster_view: unobserved treatment for " + u.id);
    v.interventional_idx.push_back(i);
    v.treatments.push_back(*u.treatment);
    v.w.push_back(u.covariates);
  }
  for (int j = 0; j < ds.num_outcome(); ++j) {
    if (part.outcome_cluster[j] != k) continue;
    const auto& u = ds.outcome[j];
    if (!u.outcome)
      throw std::runtime_error("cluster_view: unobserved outcome for " + u.id);
    v.outcome_idx.push_back(j);
    v.outcomes.push_back(*u.outcome);
    v.x.push_back(u.covariates);
  }
  return v;
}

}  // namespace bci
