#include "bci/geospatial.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "bci/rng.hpp"

namespace bci {

AssignmentResult assign_outcome_units(const BipartiteDataset& ds,
                                      const std::vector<int>& plant_cluster,
                                      int num_clusters, double buffer_km) {
  if (static_cast<int>(plant_cluster.size()) != ds.num_interventional())
    throw std::invalid_argument("assign_outcome_units: plant_cluster size");
  for (const auto& u : ds.interventional)
    if (!u.location)
      throw std::runtime_error("assign_outcome_units: plant " + u.id +
                               " has no location");
  for (const auto& u : ds.outcome)
    if (!u.location)
      throw std::runtime_error("assign_outcome_units: outcome unit " + u.id +
                               " has no location");

  AssignmentResult res;
  std::vector<std::vector<int>> plants_of(num_clusters);
  for (int i = 0; i < ds.num_interventional(); ++i) {
    const int k = plant_cluster[i];
    if (k < 0 || k >= num_clusters)
      throw std::out_of_range("assign_outcome_units: cluster index");
    plants_of[k].push_back(i);
  }
  for (int k = 0; k < num_clusters; ++k) {
    if (plants_of[k].empty())
      throw std::invalid_argument("assign_outcome_units: cluster " +
                                  std::to_string(k) + " has no plants");
    std::vector<GeoPoint> pts;
    for (int i : plants_of[k]) pts.push_back(*ds.interventional[i].location);
    auto geom = convex_hull(pts, buffer_km);
    geom.cluster = k;
    res.geometries.push_back(std::move(geom));
  }

  res.outcome_cluster.assign(ds.num_outcome(), -1);
  for (int j = 0; j < ds.num_outcome(); ++j) {
    const GeoPoint& p = *ds.outcome[j].location;
    std::vector<int> candidates;
    for (int k = 0; k < num_clusters; ++k)
      if (within_buffer(res.geometries[k], p)) candidates.push_back(k);
    if (candidates.empty()) {
      res.excluded_ids.push_back(ds.outcome[j].id);
      continue;
    }
    int chosen = candidates[0];
    if (candidates.size() > 1) {
      double best = std::numeric_limits<double>::infinity();
      for (int k : candidates) {
        for (int i : plants_of[k]) {
          const double d = haversine_km(p, *ds.interventional[i].location);
          if (d < best) {  // strict: ties keep the lowest cluster index
            best = d;
            chosen = k;
          }
        }
      }
    }
    res.outcome_cluster[j] = chosen;
  }

  res.partition.num_clusters = num_clusters;
  res.partition.interventional_cluster = plant_cluster;
  res.partition.outcome_cluster = res.outcome_cluster;
  return res;
}

std::vector<int> kmeans_clusters(const std::vector<GeoPoint>& points, int k,
                                 std::uint64_t seed, int iterations) {
  const int n = static_cast<int>(points.size());
  if (k < 1 || k > n) throw std::invalid_argument("kmeans_clusters: bad k");
  auto eng = make_engine(seed, 0xEE);
  std::vector<GeoPoint> centers;
  std::uniform_int_distribution<int> pick(0, n - 1);
  while (static_cast<int>(centers.size()) < k)
    centers.push_back(points[pick(eng)]);

  std::vector<int> assign(n, 0);
  for (int it = 0; it < iterations; ++it) {
    bool changed = false;
    for (int idx = 0; idx < n; ++idx) {
      double best = std::numeric_limits<double>::infinity();
      int arg = 0;
      for (int c = 0; c < k; ++c) {
        const double d = haversine_km(points[idx], centers[c]);
        if (d < best) {
          best = d;
          arg = c;
        }
      }
      if (assign[idx] != arg) {
        assign[idx] = arg;
        changed = true;
      }
    }
    std::vector<double> lat(k, 0.0), lon(k, 0.0);
    std::vector<int> cnt(k, 0);
    for (int idx = 0; idx < n; ++idx) {
      lat[assign[idx]] += points[idx].lat;
      lon[assign[idx]] += points[idx].lon;
      ++cnt[assign[idx]];
    }
    for (int c = 0; c < k; ++c)
      if (cnt[c] > 0) centers[c] = {lat[c] / cnt[c], lon[c] / cnt[c]};
    if (!changed) break;
  }
  return assign;
}

}  // namespace bci
