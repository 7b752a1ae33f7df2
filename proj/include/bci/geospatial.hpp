#pragma once

#include <string>
#include <vector>

#include "bci/data_model.hpp"
#include "bci/geo.hpp"

namespace bci {

struct AssignmentResult {
  ClusterPartition partition;               // over both levels
  std::vector<int> outcome_cluster;         // -1 for excluded units
  std::vector<std::string> excluded_ids;
  std::vector<ClusterGeometry> geometries;  // per cluster, buffered hulls
};

// Assigns each outcome unit to the plant cluster whose buffered convex hull
// contains it; units inside several buffered hulls go to the cluster of the
// globally closest plant among the qualifying clusters (ties to the lowest
// cluster index); units inside none are excluded. Requires locations on all
// units. plant_cluster maps each interventional unit to 0..K-1.
AssignmentResult assign_outcome_units(const BipartiteDataset& ds,
                                      const std::vector<int>& plant_cluster,
                                      int num_clusters, double buffer_km = 30.0);

// k-means style helper for generating synthetic plant clusterings; not part
// of the estimation pipeline.
std::vector<int> kmeans_clusters(const std::vector<GeoPoint>& points, int k,
                                 std::uint64_t seed, int iterations = 50);

}  // namespace bci
