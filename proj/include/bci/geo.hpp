#pragma once

#include <optional>
#include <vector>

namespace bci {

// IUGG mean Earth radius.
inline constexpr double kEarthRadiusKm = 6371.0088;

struct GeoPoint {
  double lat = 0.0;  // degrees, [-90, 90]
  double lon = 0.0;  // degrees, [-180, 180]
};

double haversine_km(const GeoPoint& a, const GeoPoint& b);

// Local equirectangular frame centered at (lat0, lon0); coordinates in km.
// Valid at continental scale; used for hull/buffer geometry only.
struct PlanarFrame {
  double lat0 = 0.0;
  double lon0 = 0.0;
  double cos_lat0 = 1.0;

  struct XY {
    double x, y;
  };
  XY project(const GeoPoint& p) const;
};

// Convex hull of a point set in a local planar frame. Degenerate hulls
// (segment for 2 collinear-or-fewer points, single point) are permitted.
struct ClusterGeometry {
  int cluster = -1;
  PlanarFrame frame;
  std::vector<PlanarFrame::XY> hull;  // counterclockwise, convex position
  double buffer_km = 30.0;
};

ClusterGeometry convex_hull(const std::vector<GeoPoint>& points,
                            double buffer_km = 30.0);

// True iff p lies inside the hull polygon or within buffer_km of its boundary.
bool within_buffer(const ClusterGeometry& geom, const GeoPoint& p);

// Distance from p to the hull boundary (0 if inside), in km.
double distance_to_hull_km(const ClusterGeometry& geom, const GeoPoint& p);

}  // namespace bci
