#include "bci/geo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace bci {

namespace {
constexpr double kDegToRad = 3.14159265358979323846 / 180.0;
}

double haversine_km(const GeoPoint& a, const GeoPoint& b) {
  const double phi1 = a.lat * kDegToRad;
  const double phi2 = b.lat * kDegToRad;
  const double dphi = (b.lat - a.lat) * kDegToRad;
  const double dlam = (b.lon - a.lon) * kDegToRad;
  const double s1 = std::sin(dphi / 2.0);
  const double s2 = std::sin(dlam / 2.0);
  const double h = s1 * s1 + std::cos(phi1) * std::cos(phi2) * s2 * s2;
  return 2.0 * kEarthRadiusKm * std::asin(std::min(1.0, std::sqrt(h)));
}

PlanarFrame::XY PlanarFrame::project(const GeoPoint& p) const {
  double dlon = p.lon - lon0;
  if (dlon > 180.0) dlon -= 360.0;
  if (dlon < -180.0) dlon += 360.0;
  return {kEarthRadiusKm * kDegToRad * dlon * cos_lat0,
          kEarthRadiusKm * kDegToRad * (p.lat - lat0)};
}

namespace {

double cross(const PlanarFrame::XY& o, const PlanarFrame::XY& a,
             const PlanarFrame::XY& b) {
  return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

double point_segment_distance(const PlanarFrame::XY& p,
                              const PlanarFrame::XY& a,
                              const PlanarFrame::XY& b) {
  const double vx = b.x - a.x, vy = b.y - a.y;
  const double wx = p.x - a.x, wy = p.y - a.y;
  const double vv = vx * vx + vy * vy;
  double t = vv > 0.0 ? (wx * vx + wy * vy) / vv : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  const double dx = p.x - (a.x + t * vx), dy = p.y - (a.y + t * vy);
  return std::sqrt(dx * dx + dy * dy);
}

}  // namespace

ClusterGeometry convex_hull(const std::vector<GeoPoint>& points,
                            double buffer_km) {
  ClusterGeometry geom;
  geom.buffer_km = buffer_km;

  double lat = 0.0, lon = 0.0;
  for (const auto& p : points) {
    lat += p.lat;
    lon += p.lon;
  }
  const double n = static_cast<double>(points.size());
  geom.frame.lat0 = points.empty() ? 0.0 : lat / n;
  geom.frame.lon0 = points.empty() ? 0.0 : lon / n;
  geom.frame.cos_lat0 = std::cos(geom.frame.lat0 * (3.14159265358979323846 / 180.0));

  std::vector<PlanarFrame::XY> pts;
  pts.reserve(points.size());
  for (const auto& p : points) pts.push_back(geom.frame.project(p));

  std::sort(pts.begin(), pts.end(), [](const auto& a, const auto& b) {
    return a.x < b.x || (a.x == b.x && a.y < b.y);
  });
  pts.erase(std::unique(pts.begin(), pts.end(),
                        [](const auto& a, const auto& b) {
                          return a.x == b.x && a.y == b.y;
                        }),
            pts.end());

  if (pts.size() <= 2) {
    geom.hull = pts;
    return geom;
  }

  // Andrew's monotone chain, counterclockwise output.
  std::vector<PlanarFrame::XY> hull(2 * pts.size());
  std::size_t k = 0;
  for (const auto& p : pts) {
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], p) <= 0) --k;
    hull[k++] = p;
  }
  const std::size_t lower = k + 1;
  for (auto it = pts.rbegin() + 1; it != pts.rend(); ++it) {
    while (k >= lower && cross(hull[k - 2], hull[k - 1], *it) <= 0) --k;
    hull[k++] = *it;
  }
  hull.resize(k - 1);  // collinear inputs reduce to a 2-point segment
  geom.hull = std::move(hull);
  return geom;
}

double distance_to_hull_km(const ClusterGeometry& geom, const GeoPoint& p) {
  const auto q = geom.frame.project(p);
  const auto& h = geom.hull;
  if (h.empty()) return std::numeric_limits<double>::infinity();
  if (h.size() == 1) {
    const double dx = q.x - h[0].x, dy = q.y - h[0].y;
    return std::sqrt(dx * dx + dy * dy);
  }
  if (h.size() == 2) return point_segment_distance(q, h[0], h[1]);

  bool inside = true;
  double dmin = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < h.size(); ++i) {
    const auto& a = h[i];
    const auto& b = h[(i + 1) % h.size()];
    if (cross(a, b, q) < 0) inside = false;
    dmin = std::min(dmin, point_segment_distance(q, a, b));
  }
  return inside ? 0.0 : dmin;
}

bool within_buffer(const ClusterGeometry& geom, const GeoPoint& p) {
  return distance_to_hull_km(geom, p) <= geom.buffer_km;
}

}  // namespace bci
