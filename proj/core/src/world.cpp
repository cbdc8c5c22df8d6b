#include "safenav/world.hpp"

#include <cmath>
#include <limits>

namespace safenav {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kDiscriminantTol = 1e-12;

// Smallest s >= 0 with |o + s d - c| = r; tangential grazes count.
double ray_ball(const Eigen::Ref<const Vec>& o, const Eigen::Ref<const Vec>& d,
                const Eigen::Ref<const Vec>& c, double r) {
  const Vec oc = o - c;
  const double b = oc.dot(d);
  const double q = oc.squaredNorm() - r * r;
  double disc = b * b - q;
  if (disc < -kDiscriminantTol) return kInf;
  disc = std::max(disc, 0.0);
  const double root = std::sqrt(disc);
  const double s1 = -b - root;
  if (s1 >= 0.0) return s1;
  const double s2 = -b + root;
  if (s2 >= 0.0) return s2;
  return kInf;
}

double ray_segment(const Eigen::Vector2d& o, const Eigen::Vector2d& d,
                   const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
  const Eigen::Vector2d e = b - a;
  const double denom = d.x() * e.y() - d.y() * e.x();
  if (std::abs(denom) < 1e-15) return kInf;
  const Eigen::Vector2d ao = a - o;
  const double s = (ao.x() * e.y() - ao.y() * e.x()) / denom;  // along ray
  const double w = (ao.x() * d.y() - ao.y() * d.x()) / denom;  // along segment
  if (s < 0.0 || w < -1e-12 || w > 1.0 + 1e-12) return kInf;
  return s;
}

double point_segment_distance(const Eigen::Vector2d& p, const Eigen::Vector2d& a,
                              const Eigen::Vector2d& b) {
  const Eigen::Vector2d e = b - a;
  const double len2 = e.squaredNorm();
  if (len2 < 1e-30) return (p - a).norm();
  const double w = std::clamp((p - a).dot(e) / len2, 0.0, 1.0);
  return (p - (a + w * e)).norm();
}

bool point_in_polygon(const Eigen::Vector2d& p, const std::vector<Eigen::Vector2d>& verts) {
  bool inside = false;
  const size_t n = verts.size();
  for (size_t i = 0, j = n - 1; i < n; j = i++) {
    const auto& vi = verts[i];
    const auto& vj = verts[j];
    if ((vi.y() > p.y()) != (vj.y() > p.y()) &&
        p.x() < (vj.x() - vi.x()) * (p.y() - vi.y()) / (vj.y() - vi.y()) + vi.x())
      inside = !inside;
  }
  return inside;
}

double polygon_boundary_distance(const Eigen::Vector2d& p,
                                 const std::vector<Eigen::Vector2d>& verts) {
  double best = kInf;
  const size_t n = verts.size();
  for (size_t i = 0; i < n; ++i)
    best = std::min(best, point_segment_distance(p, verts[i], verts[(i + 1) % n]));
  return best;
}

double polygon_signed_distance(const Eigen::Vector2d& p,
                               const std::vector<Eigen::Vector2d>& verts) {
  const double d = polygon_boundary_distance(p, verts);
  return point_in_polygon(p, verts) ? -d : d;
}

double ray_polygon(const Eigen::Vector2d& o, const Eigen::Vector2d& d,
                   const std::vector<Eigen::Vector2d>& verts) {
  double best = kInf;
  const size_t n = verts.size();
  for (size_t i = 0; i < n; ++i)
    best = std::min(best, ray_segment(o, d, verts[i], verts[(i + 1) % n]));
  return best;
}

double ray_chain(const Eigen::Vector2d& o, const Eigen::Vector2d& d,
                 const std::vector<Eigen::Vector2d>& pts) {
  double best = kInf;
  for (size_t i = 0; i + 1 < pts.size(); ++i)
    best = std::min(best, ray_segment(o, d, pts[i], pts[i + 1]));
  return best;
}

double ray_prism(const Eigen::Vector3d& o, const Eigen::Vector3d& d, const Prism& prism) {
  double best = kInf;
  const size_t n = prism.footprint.size();
  const Eigen::Vector2d o2(o.x(), o.y());
  const Eigen::Vector2d d2(d.x(), d.y());
  // side faces: footprint edges extruded in z
  const double planar = d2.norm();
  if (planar > 1e-15) {
    const Eigen::Vector2d d2n = d2 / planar;
    for (size_t i = 0; i < n; ++i) {
      const double s2 = ray_segment(o2, d2n, prism.footprint[i], prism.footprint[(i + 1) % n]);
      if (!std::isfinite(s2)) continue;
      const double s = s2 / planar;  // rescale to 3D parameter
      const double z = o.z() + s * d.z();
      if (z >= prism.z_min - 1e-12 && z <= prism.z_max + 1e-12) best = std::min(best, s);
    }
  }
  // caps
  if (std::abs(d.z()) > 1e-15) {
    for (double zc : {prism.z_min, prism.z_max}) {
      const double s = (zc - o.z()) / d.z();
      if (s < 0.0) continue;
      const Eigen::Vector2d hit = o2 + s * d2;
      if (point_in_polygon(hit, prism.footprint)) best = std::min(best, s);
    }
  }
  return best;
}

double prism_signed_distance(const Eigen::Vector3d& p, const Prism& prism) {
  const Eigen::Vector2d p2(p.x(), p.y());
  const double dxy = polygon_signed_distance(p2, prism.footprint);
  const double dz = std::max(prism.z_min - p.z(), p.z() - prism.z_max);
  if (dxy <= 0.0 && dz <= 0.0) return std::max(dxy, dz);  // inside: depth
  const double ox = std::max(dxy, 0.0);
  const double oz = std::max(dz, 0.0);
  return std::sqrt(ox * ox + oz * oz);
}

}  // namespace

Vec DynamicObstacle::position(double t) const {
  if (waypoints.empty()) throw ConfigError("dynamic obstacle without waypoints");
  if (waypoints.size() == 1 || speed <= 0.0 || t <= 0.0) return waypoints.front();
  double remaining = speed * std::max(t, 0.0);
  for (size_t i = 0; i + 1 < waypoints.size(); ++i) {
    const Vec seg = waypoints[i + 1] - waypoints[i];
    const double len = seg.norm();
    if (remaining <= len) {
      if (len < 1e-15) return waypoints[i];
      return waypoints[i] + (remaining / len) * seg;
    }
    remaining -= len;
  }
  return waypoints.back();
}

bool World::inside_bounds(const Vec& p) const {
  for (int i = 0; i < dim; ++i)
    if (p(i) < bounds_min(i) || p(i) > bounds_max(i)) return false;
  return true;
}

void World::validate(double vbar) const {
  if (dim != 2 && dim != 3) throw ConfigError("world: dim must be 2 or 3");
  if (bounds_min.size() != dim || bounds_max.size() != dim)
    throw ConfigError("world: bounds dimension mismatch");
  for (int i = 0; i < dim; ++i)
    if (!(bounds_min(i) < bounds_max(i))) throw ConfigError("world: empty bounds");
  const auto check_inside = [&](const Vec& p) {
    if (!inside_bounds(p)) throw ConfigError("world: obstacle outside bounds");
  };
  for (const auto& c : circles) check_inside(Vec(c.center));
  for (const auto& s : spheres) check_inside(Vec(s.center));
  for (const auto& d : dynamic) {
    if (d.waypoints.empty()) throw ConfigError("world: dynamic obstacle without waypoints");
    for (const auto& w : d.waypoints) {
      if (w.size() != dim) throw ConfigError("world: waypoint dimension mismatch");
      check_inside(w);
    }
    if (vbar > 0.0 && d.speed > vbar + 1e-12)
      throw ConfigError("world: dynamic obstacle faster than the declared bound");
  }
}

Scan ray_cast(const World& world, double t, const Vec& pose, double heading,
              const LidarSpec& spec) {
  if (!world.inside_bounds(pose)) throw PreconditionError("ray_cast: pose outside bounds");
  if (spec.beams < 1 || !(spec.max_range > 0.0)) throw ConfigError("ray_cast: bad lidar spec");

  Scan scan;
  scan.dim = world.dim;
  scan.pose = pose;
  scan.heading = heading;

  std::vector<Vec> dyn_pos = advance_obstacles(world, t);

  const auto nearest_hit_2d = [&](const Eigen::Vector2d& o, const Eigen::Vector2d& d) {
    double best = kInf;
    for (const auto& c : world.circles) best = std::min(best, ray_ball(o, d, Vec(c.center), c.radius));
    for (const auto& p : world.polygons) best = std::min(best, ray_polygon(o, d, p.vertices));
    for (const auto& ch : world.chains) best = std::min(best, ray_chain(o, d, ch.points));
    for (size_t i = 0; i < world.dynamic.size(); ++i)
      best = std::min(best, ray_ball(o, d, dyn_pos[i], world.dynamic[i].radius));
    return best;
  };

  if (world.dim == 2) {
    const Eigen::Vector2d origin(pose(0), pose(1));
    const bool full = spec.fov >= 2.0 * M_PI - 1e-12;
    const double start = heading - 0.5 * spec.fov;
    const double step = full ? spec.fov / spec.beams
                             : (spec.beams > 1 ? spec.fov / (spec.beams - 1) : 0.0);
    for (int i = 0; i < spec.beams; ++i) {
      const double angle = start + i * step;
      const Eigen::Vector2d d(std::cos(angle), std::sin(angle));
      const double s = nearest_hit_2d(origin, d);
      if (s <= spec.max_range) {
        ScanPoint pt;
        pt.range = s;
        pt.azimuth = std::fmod(angle, 2.0 * M_PI);
        if (pt.azimuth < 0.0) pt.azimuth += 2.0 * M_PI;
        scan.points.push_back(pt);
      }
    }
    return scan;
  }

  // 3D: azimuth columns x elevation rows
  const Eigen::Vector3d origin(pose(0), pose(1), pose(2));
  const int n_az = std::max(1, spec.azimuth_count);
  const int n_el = std::max(2, spec.elevation_count);
  if (n_az * n_el > spec.beams) throw ConfigError("ray_cast: 3D grid exceeds the beam budget");
  for (int j = 0; j < n_az; ++j) {
    const double az = j * 2.0 * M_PI / n_az;
    for (int l = 0; l < n_el; ++l) {
      const double el = -0.5 * M_PI + l * M_PI / (n_el - 1);
      const Eigen::Vector3d d(std::sin(el) * std::cos(az), std::sin(el) * std::sin(az),
                              std::cos(el));
      double best = kInf;
      for (const auto& sp : world.spheres) best = std::min(best, ray_ball(origin, d, Vec(sp.center), sp.radius));
      for (const auto& pr : world.prisms) best = std::min(best, ray_prism(origin, d, pr));
      for (size_t i = 0; i < world.dynamic.size(); ++i)
        best = std::min(best, ray_ball(origin, d, dyn_pos[i], world.dynamic[i].radius));
      if (best <= spec.max_range) {
        ScanPoint pt;
        pt.range = best;
        pt.azimuth = az;
        pt.elevation = el;
        scan.points.push_back(pt);
      }
    }
  }
  return scan;
}

double min_clearance(const World& world, double t, const Vec& position) {
  double best = kInf;
  if (world.dim == 2) {
    const Eigen::Vector2d p(position(0), position(1));
    for (const auto& c : world.circles) best = std::min(best, (p - c.center).norm() - c.radius);
    for (const auto& poly : world.polygons)
      best = std::min(best, polygon_signed_distance(p, poly.vertices));
    for (const auto& ch : world.chains)
      for (size_t i = 0; i + 1 < ch.points.size(); ++i)
        best = std::min(best, point_segment_distance(p, ch.points[i], ch.points[i + 1]));
  } else {
    const Eigen::Vector3d p(position(0), position(1), position(2));
    for (const auto& s : world.spheres) best = std::min(best, (p - s.center).norm() - s.radius);
    for (const auto& pr : world.prisms) best = std::min(best, prism_signed_distance(p, pr));
  }
  for (const auto& d : world.dynamic)
    best = std::min(best, (position.head(world.dim) - d.position(t)).norm() - d.radius);
  return best;
}

std::vector<Vec> advance_obstacles(const World& world, double t) {
  std::vector<Vec> out;
  out.reserve(world.dynamic.size());
  for (const auto& d : world.dynamic) out.push_back(d.position(t));
  return out;
}

}  // namespace safenav
