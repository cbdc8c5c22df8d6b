#pragma once

#include <vector>

#include "safenav/barrier.hpp"
#include "safenav/errors.hpp"
#include "safenav/jet.hpp"

namespace safenav {

struct Circle {  // 2D
  Eigen::Vector2d center;
  double radius;
};

struct ConvexPolygon {  // 2D, counter-clockwise vertices
  std::vector<Eigen::Vector2d> vertices;
};

struct SegmentChain {  // 2D thin wall
  std::vector<Eigen::Vector2d> points;
};

struct Sphere {  // 3D
  Eigen::Vector3d center;
  double radius;
};

struct Prism {  // 3D: convex polygon footprint extruded in z
  std::vector<Eigen::Vector2d> footprint;  // counter-clockwise
  double z_min = 0.0;
  double z_max = 1.0;
};

/// Disk (2D) or sphere (3D) moving along piecewise-linear waypoints at
/// constant speed; holds the last waypoint after the trajectory ends.
struct DynamicObstacle {
  double radius = 0.5;
  double speed = 0.0;
  std::vector<Vec> waypoints;

  Vec position(double t) const;
};

struct World {
  int dim = 2;
  Vec bounds_min, bounds_max;
  std::vector<Circle> circles;
  std::vector<ConvexPolygon> polygons;
  std::vector<SegmentChain> chains;
  std::vector<Sphere> spheres;
  std::vector<Prism> prisms;
  std::vector<DynamicObstacle> dynamic;

  bool inside_bounds(const Vec& p) const;
  /// Checks declared invariants (dimensions, dynamic speeds vs. vbar when
  /// given, obstacles inside bounds) and throws ConfigError on violation.
  void validate(double vbar = 0.0) const;
};

struct LidarSpec {
  double max_range = 5.0;
  int beams = 100;          // cap on returned points
  double fov = 2.0 * M_PI;  // 2D angular coverage
  double period = 0.2;
  // 3D scanning grid (azimuth columns x elevation rows, product <= beams)
  int azimuth_count = 30;
  int elevation_count = 10;
};

/// Cast all beams from the pose at time t. Beams are equally spaced with the
/// first at heading - fov/2; each returns the nearest obstacle intersection
/// within max_range or nothing. Dynamic obstacles are evaluated at t.
Scan ray_cast(const World& world, double t, const Vec& pose, double heading,
              const LidarSpec& spec);

/// Signed distance from the point to the nearest obstacle (negative when
/// penetrating).
double min_clearance(const World& world, double t, const Vec& position);

/// Positions of all dynamic obstacles at time t.
std::vector<Vec> advance_obstacles(const World& world, double t);

}  // namespace safenav
