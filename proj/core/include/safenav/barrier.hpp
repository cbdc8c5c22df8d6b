#pragma once

#include <optional>
#include <vector>

#include "safenav/errors.hpp"
#include "safenav/jet.hpp"

namespace safenav {

/// One range-sensor return. Azimuth is absolute (world frame); elevation is
/// only meaningful for 3D scans.
struct ScanPoint {
  double range = 0.0;
  double azimuth = 0.0;
  double elevation = 0.0;
};

/// A perception snapshot: sensor pose at capture time plus the detected
/// points in polar (2D) or spherical (3D) coordinates relative to the pose.
struct Scan {
  int index_k = 0;
  int dim = 2;  // 2 or 3
  Vec pose;     // sensor position at capture, length dim
  double heading = 0.0;  // 2D only
  std::vector<ScanPoint> points;
};

/// Parameters of the scan-to-barrier synthesis.
struct BarrierConfig {
  double max_range = 5.0;  // detection radius
  double eps_a = 0.15;     // exclusion spheroid margin
  double eps_beta = 0.15;  // detection-region margin
  double rho = 30.0;       // soft-min sharpness
  std::optional<double> fov;   // limited field of view (2D), radians
  int window_n = 1;            // N, used by the dynamic-margin rule
  double period = 0.2;         // perception period T
  std::optional<double> vbar;  // obstacle speed bound; enables the margin rule
  // When solving the limited-FOV offset, keep the capture pose strictly
  // inside the modeled region by this much instead of exactly on its
  // boundary.
  double fov_interior_margin = 0.02;
};

/// Margin that covers everything a detected point can reach over one full
/// perception window.
inline double dynamic_margin(double period, int window_n, double vbar) {
  return period * (window_n + 1) * vbar;
}

/// Quadratic exclusion term: negative inside a spheroid that covers the
/// detected point and everything radially behind it up to the detection
/// boundary.
struct ExclusionTerm {
  Vec center;     // midpoint of the detected point and its radial projection
  Mat rotation;   // rows: major axis direction, then minor directions
  Vec semi_axes;  // (a, z) in 2D, (a, z, z) in 3D
  Mat quad;       // cached R^T diag(axes^-2) R

  double value(const Vec& pos) const;
  void accumulate_jet(const Vec& pos, double& v, Vec& grad, Mat& hess) const;
};

/// Model of the sensor's detection area.
struct DetectionRegion {
  enum class Kind { Disk360, LimitedFov };
  Kind kind = Kind::Disk360;
  Vec center;           // capture position
  double radius = 0.0;  // max_range - eps_beta
  // LimitedFov only:
  double heading = 0.0;
  double fov = 0.0;
  double offset = 0.0;  // half-plane offset, solved at synthesis time
  double rho = 0.0;     // inner soft-min sharpness
};

/// One snapshot b_k: soft minimum of the detection-region function and all
/// exclusion terms. Immutable after synthesis; evaluation is reentrant.
struct PerceptionBarrier {
  std::vector<ExclusionTerm> terms;
  DetectionRegion region;
  double rho = 30.0;
  int dim = 2;
  int index_k = 0;

  /// Value only, position-space argument of length dim.
  double value(const Vec& pos) const;
  /// Full jet in position space (time partials are zero: each snapshot is
  /// frozen for its lifetime).
  ScalarJet2 position_jet(const Vec& pos) const;
  /// Region function xi_k alone (soft-composed half planes for limited FOV).
  double region_value(const Vec& pos) const;
  ScalarJet2 region_jet(const Vec& pos) const;
};

PerceptionBarrier synthesize_barrier(const Scan& scan, const BarrierConfig& cfg);

/// Jet of b at a full state vector; the barrier reads the leading `dim`
/// entries as position, so the gradient vanishes in all remaining
/// coordinates.
ScalarJet2 eval_barrier_jet(const PerceptionBarrier& b, const Vec& x);

/// Offset that puts the capture pose on the zero level of the limited-FOV
/// region function: bisection root of softmin_rho(beta, -eps, -eps) = 0 over
/// eps in [-10, 10], residual < 1e-10. theta_f is carried for interface
/// completeness; the two half planes meet at the pose regardless of the FOV
/// angle.
double solve_fov_offset(double beta_value_at_pose, double theta_f, double rho);

}  // namespace safenav
