#include "doctest.h"

#include <cmath>
#include <random>

#include "bci/geo.hpp"

using namespace bci;

namespace {

// One degree of latitude in km on the reference sphere.
const double kDegKm = (std::acos(-1.0) / 180.0) * kEarthRadiusKm;

GeoPoint north_of(const GeoPoint& p, double km) {
  return {p.lat + km / kDegKm, p.lon};
}

}  // namespace

TEST_CASE("haversine identity and equatorial degree") {
  CHECK(haversine_km({0, 0}, {0, 0}) == 0.0);
  CHECK(std::abs(haversine_km({0, 0}, {0, 1}) - 111.1951) < 1e-3);
  // One degree of latitude has the same length everywhere on a sphere.
  CHECK(std::abs(haversine_km({40, -100}, {41, -100}) - kDegKm) < 1e-9);
}

TEST_CASE("haversine symmetry on randomized pairs") {
  std::mt19937_64 eng(7);
  std::uniform_real_distribution<double> lat(-80, 80), lon(-180, 180);
  for (int t = 0; t < 200; ++t) {
    GeoPoint a{lat(eng), lon(eng)}, b{lat(eng), lon(eng)};
    CHECK(std::abs(haversine_km(a, b) - haversine_km(b, a)) < 1e-12);
    CHECK(haversine_km(a, b) >= 0.0);
  }
}

TEST_CASE("square hull excludes interior center") {
  std::vector<GeoPoint> pts = {
      {40.0, -100.0}, {40.0, -99.0}, {41.0, -100.0}, {41.0, -99.0},
      {40.5, -99.5}  // center
  };
  auto geom = convex_hull(pts);
  CHECK(geom.hull.size() == 4);
  CHECK(within_buffer(geom, {40.5, -99.5}));
}

TEST_CASE("degenerate hulls: two points and one point") {
  auto seg = convex_hull({{40.0, -100.0}, {40.0, -99.0}});
  CHECK(seg.hull.size() == 2);
  auto pt = convex_hull({{40.0, -100.0}});
  CHECK(pt.hull.size() == 1);
  CHECK(within_buffer(pt, {40.0, -100.0}));
}

TEST_CASE("collinear inputs reduce to a segment") {
  auto seg = convex_hull({{40.0, -100.0}, {40.0, -99.5}, {40.0, -99.0}});
  CHECK(seg.hull.size() == 2);
  CHECK(distance_to_hull_km(seg, {40.0, -99.5}) < 1e-9);
}

TEST_CASE("random point clouds are contained in their hull") {
  std::mt19937_64 eng(11);
  std::uniform_real_distribution<double> dl(-1.0, 1.0);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<GeoPoint> pts;
    for (int t = 0; t < 50; ++t) pts.push_back({40.0 + dl(eng), -100.0 + dl(eng)});
    auto geom = convex_hull(pts, 0.0);
    for (const auto& p : pts) {
      CHECK(distance_to_hull_km(geom, p) < 1e-9);
      CHECK(within_buffer(geom, p));
    }
  }
}

TEST_CASE("buffer decision at 29.9 and 30.1 km from a single-plant hull") {
  GeoPoint plant{40.0, -100.0};
  auto geom = convex_hull({plant});  // buffer_km = 30 default
  CHECK(within_buffer(geom, north_of(plant, 29.9)));
  CHECK(!within_buffer(geom, north_of(plant, 30.1)));
  CHECK(std::abs(distance_to_hull_km(geom, north_of(plant, 29.9)) - 29.9) < 0.05);
}

TEST_CASE("hull vertex is at distance zero") {
  std::vector<GeoPoint> pts = {{40.0, -100.0}, {40.0, -99.0}, {41.0, -99.5}};
  auto geom = convex_hull(pts);
  for (const auto& p : pts) {
    CHECK(distance_to_hull_km(geom, p) < 1e-9);
    CHECK(within_buffer(geom, p));
  }
}
