#pragma once

#include <functional>

#include "safenav/jet.hpp"

namespace safenav {

/// Control-affine plant xdot = f(x) + g(x) u with a position selector: the
/// leading pos_dim states are the position coordinates the barriers act on.
struct SystemModel {
  int n = 0;
  int m = 0;
  int pos_dim = 0;
  int r = 2;  // relative degree of position barriers
  std::function<Vec(const Vec&)> f;
  std::function<Mat(const Vec&)> g;
  std::function<Mat(const Vec&)> jac_f;

  Vec deriv(const Vec& x, const Vec& u) const { return f(x) + g(x) * u; }
};

/// Planar unicycle with speed and heading as states: x = (qx, qy, v, theta),
/// u = (forward acceleration, turn rate).
SystemModel unicycle_model();

/// Triple-axis double integrator: x = (q, p), u = acceleration.
SystemModel double_integrator_model();

/// Goal-seeking feedback for the unicycle. Drives q to q_g; no knowledge of
/// obstacles. Returns zero inside goal_radius and clamps the 1/dist term to
/// keep the law defined at the goal.
Vec unicycle_desired_control(const Vec& x, const Vec& q_g, double k1, double k2,
                             double k3, double goal_radius = 0.05);

/// Saturated PD law for the double-integrator design model.
Vec quadrotor_desired_control(const Vec& q, const Vec& p, const Vec& q_g,
                              double k5, double k6);

// ---------------------------------------------------------------------------
// Attitude-stabilized quadrotor
// ---------------------------------------------------------------------------

struct QuadrotorParams {
  double mass = 0.1;
  double gravity = 9.81;
  double k1 = 3.4e3;    // attitude proportional gain
  double k2 = 116.67;   // attitude rate gain
  double k3 = 1950.0;   // yaw-rate gain
  double k4 = 3.9e3;    // thrust gain
  double tilt_limit = 80.0 * M_PI / 180.0;
};

struct QuadrotorState {
  Eigen::Vector3d q = Eigen::Vector3d::Zero();
  Eigen::Vector3d p = Eigen::Vector3d::Zero();
  Eigen::Matrix3d R = Eigen::Matrix3d::Identity();
  Eigen::Vector3d omega = Eigen::Vector3d::Zero();
  double F = 0.0;

  static QuadrotorState hover(const Eigen::Vector3d& q0, const QuadrotorParams& par);
};

struct QuadrotorDeriv {
  Eigen::Vector3d dq, dp, domega;
  Eigen::Matrix3d dR;
  double dF = 0.0;
  bool saturated = false;
};

/// Commanded roll/pitch/thrust realizing the translational acceleration u
/// (yaw command is identically zero). Tilt commands are clamped at the limit
/// and thrust at zero.
struct AttitudeCommand {
  double phi_c = 0.0;
  double theta_c = 0.0;
  double thrust_c = 0.0;
  bool saturated = false;
};
AttitudeCommand quadrotor_attitude_command(const Eigen::Vector3d& u, const QuadrotorParams& par);

QuadrotorDeriv quadrotor_derivative(const QuadrotorState& s, const Eigen::Vector3d& u,
                                    const QuadrotorParams& par);

/// One fixed step with the rotation advanced through the exponential map and
/// re-orthonormalized; classical 4th-order stages on exponential coordinates.
QuadrotorState quadrotor_step(const QuadrotorState& s, const Eigen::Vector3d& u, double dt,
                              const QuadrotorParams& par, bool* saturated = nullptr);

Eigen::Matrix3d so3_exp(const Eigen::Vector3d& w);
Eigen::Matrix3d so3_hat(const Eigen::Vector3d& w);

}  // namespace safenav
