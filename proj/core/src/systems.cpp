#include "safenav/systems.hpp"

#include <cmath>

namespace safenav {

SystemModel unicycle_model() {
  SystemModel mdl;
  mdl.n = 4;
  mdl.m = 2;
  mdl.pos_dim = 2;
  mdl.f = [](const Vec& x) {
    Vec out(4);
    out << x(2) * std::cos(x(3)), x(2) * std::sin(x(3)), 0.0, 0.0;
    return out;
  };
  mdl.g = [](const Vec&) {
    Mat g = Mat::Zero(4, 2);
    g(2, 0) = 1.0;
    g(3, 1) = 1.0;
    return g;
  };
  mdl.jac_f = [](const Vec& x) {
    Mat j = Mat::Zero(4, 4);
    const double c = std::cos(x(3)), s = std::sin(x(3));
    j(0, 2) = c;
    j(0, 3) = -x(2) * s;
    j(1, 2) = s;
    j(1, 3) = x(2) * c;
    return j;
  };
  return mdl;
}

SystemModel double_integrator_model() {
  SystemModel mdl;
  mdl.n = 6;
  mdl.m = 3;
  mdl.pos_dim = 3;
  mdl.f = [](const Vec& x) {
    Vec out = Vec::Zero(6);
    out.head(3) = x.tail(3);
    return out;
  };
  mdl.g = [](const Vec&) {
    Mat g = Mat::Zero(6, 3);
    g.bottomRows(3) = Mat::Identity(3, 3);
    return g;
  };
  mdl.jac_f = [](const Vec&) {
    Mat j = Mat::Zero(6, 6);
    j.topRightCorner(3, 3) = Mat::Identity(3, 3);
    return j;
  };
  return mdl;
}

Vec unicycle_desired_control(const Vec& x, const Vec& q_g, double k1, double k2,
                             double k3, double goal_radius) {
  Vec u = Vec::Zero(2);
  const double ex = x(0) - q_g(0);
  const double ey = x(1) - q_g(1);
  const double dist = std::sqrt(ex * ex + ey * ey);
  if (dist <= goal_radius) return u;

  const double v = x(2);
  const double delta = std::atan2(ey, ex) - x(3) + M_PI;
  const double sd = std::sin(delta), cd = std::cos(delta);
  u(0) = -(k1 + k3) * v + (1.0 + k1 * k3) * dist * cd + k1 * (k2 * dist + v) * sd * sd;
  u(1) = (k2 + v / std::max(dist, 1e-6)) * sd;
  return u;
}

Vec quadrotor_desired_control(const Vec& q, const Vec& p, const Vec& q_g,
                              double k5, double k6) {
  Vec u(3);
  for (int i = 0; i < 3; ++i) u(i) = k5 * std::tanh(q_g(i) - q(i)) - k6 * p(i);
  return u;
}

// ---------------------------------------------------------------------------
// Quadrotor
// ---------------------------------------------------------------------------

Eigen::Matrix3d so3_hat(const Eigen::Vector3d& w) {
  Eigen::Matrix3d m;
  m << 0.0, -w.z(), w.y(),  //
      w.z(), 0.0, -w.x(),   //
      -w.y(), w.x(), 0.0;
  return m;
}

Eigen::Matrix3d so3_exp(const Eigen::Vector3d& w) {
  const double angle = w.norm();
  const Eigen::Matrix3d hat = so3_hat(w);
  if (angle < 1e-10) return Eigen::Matrix3d::Identity() + hat + 0.5 * hat * hat;
  const double a = std::sin(angle) / angle;
  const double b = (1.0 - std::cos(angle)) / (angle * angle);
  return Eigen::Matrix3d::Identity() + a * hat + b * hat * hat;
}

QuadrotorState QuadrotorState::hover(const Eigen::Vector3d& q0, const QuadrotorParams& par) {
  QuadrotorState s;
  s.q = q0;
  s.F = par.mass * par.gravity;
  return s;
}

AttitudeCommand quadrotor_attitude_command(const Eigen::Vector3d& u, const QuadrotorParams& par) {
  AttitudeCommand cmd;
  const double denom = u.z() + par.gravity;
  cmd.theta_c = std::atan(u.x() / denom);
  cmd.phi_c = std::atan(-u.y() * std::cos(cmd.theta_c) / denom);
  const double lim = par.tilt_limit;
  if (std::abs(cmd.theta_c) > lim || std::abs(cmd.phi_c) > lim || denom <= 0.0) {
    cmd.theta_c = std::clamp(cmd.theta_c, -lim, lim);
    cmd.phi_c = std::clamp(cmd.phi_c, -lim, lim);
    cmd.saturated = true;
  }
  cmd.thrust_c = denom * par.mass / (std::cos(cmd.phi_c) * std::cos(cmd.theta_c));
  if (cmd.thrust_c < 0.0) {
    cmd.thrust_c = 0.0;
    cmd.saturated = true;
  }
  return cmd;
}

namespace {

struct EulerAngles {
  double roll, pitch, yaw;      // 3-2-1 sequence
  double droll, dpitch, dyaw;   // rates from body angular velocity
};

EulerAngles euler_from(const Eigen::Matrix3d& R, const Eigen::Vector3d& omega) {
  EulerAngles e;
  const double s_pitch = std::clamp(-R(2, 0), -1.0, 1.0);
  e.pitch = std::asin(s_pitch);
  // keep the rate map nonsingular
  const double lim = 0.5 * M_PI - 1e-6;
  e.pitch = std::clamp(e.pitch, -lim, lim);
  e.roll = std::atan2(R(2, 1), R(2, 2));
  e.yaw = std::atan2(R(1, 0), R(0, 0));

  const double sr = std::sin(e.roll), cr = std::cos(e.roll);
  const double tp = std::tan(e.pitch), cp = std::cos(e.pitch);
  e.droll = omega.x() + (omega.y() * sr + omega.z() * cr) * tp;
  e.dpitch = omega.y() * cr - omega.z() * sr;
  e.dyaw = (omega.y() * sr + omega.z() * cr) / cp;
  return e;
}

}  // namespace

QuadrotorDeriv quadrotor_derivative(const QuadrotorState& s, const Eigen::Vector3d& u,
                                    const QuadrotorParams& par) {
  QuadrotorDeriv d;
  const AttitudeCommand cmd = quadrotor_attitude_command(u, par);
  d.saturated = cmd.saturated;

  d.dq = s.p;
  d.dp = (s.F / par.mass) * s.R.col(2) - par.gravity * Eigen::Vector3d::UnitZ();
  d.dR = s.R * so3_hat(s.omega);

  const EulerAngles e = euler_from(s.R, s.omega);
  Eigen::Vector3d inner;
  inner << par.k1 * (cmd.phi_c - e.roll) + par.k2 * (-e.droll),
      par.k1 * (cmd.theta_c - e.pitch) + par.k2 * (-e.dpitch),
      par.k3 * (0.0 - e.dyaw);

  Eigen::Matrix3d rate_map;
  const double sr = std::sin(e.roll), cr = std::cos(e.roll);
  const double sp = std::sin(e.pitch), cp = std::cos(e.pitch);
  rate_map << 1.0, 0.0, -sp,  //
      0.0, cr, sr * cp,       //
      0.0, -sr, cr * cp;
  d.domega = rate_map * inner;

  d.dF = par.k4 * (cmd.thrust_c - s.F);
  return d;
}

namespace {

// dexp^-1 on so(3), truncated commutator series; exact enough for one-step
// exponential coordinates that start at zero.
Eigen::Vector3d dexpinv(const Eigen::Vector3d& theta, const Eigen::Vector3d& w) {
  const Eigen::Vector3d c1 = theta.cross(w);
  return w - 0.5 * c1 + (1.0 / 12.0) * theta.cross(c1);
}

struct QuadStage {
  Eigen::Vector3d dq, dp, dtheta, domega;
  double dF;
  bool saturated;
};

QuadStage stage_deriv(const QuadrotorState& base, const Eigen::Vector3d& q,
                      const Eigen::Vector3d& p, const Eigen::Vector3d& theta,
                      const Eigen::Vector3d& omega, double F, const Eigen::Vector3d& u,
                      const QuadrotorParams& par) {
  QuadrotorState s;
  s.q = q;
  s.p = p;
  s.R = base.R * so3_exp(theta);
  s.omega = omega;
  s.F = F;
  const QuadrotorDeriv d = quadrotor_derivative(s, u, par);
  QuadStage st;
  st.dq = d.dq;
  st.dp = d.dp;
  st.dtheta = dexpinv(theta, omega);
  st.domega = d.domega;
  st.dF = d.dF;
  st.saturated = d.saturated;
  return st;
}

void orthonormalize(Eigen::Matrix3d& R) {
  Eigen::Vector3d c0 = R.col(0).normalized();
  Eigen::Vector3d c1 = (R.col(1) - c0 * c0.dot(R.col(1))).normalized();
  Eigen::Vector3d c2 = c0.cross(c1);
  R.col(0) = c0;
  R.col(1) = c1;
  R.col(2) = c2;
}

}  // namespace

QuadrotorState quadrotor_step(const QuadrotorState& s, const Eigen::Vector3d& u, double dt,
                              const QuadrotorParams& par, bool* saturated) {
  const Eigen::Vector3d zero = Eigen::Vector3d::Zero();
  const QuadStage k1 = stage_deriv(s, s.q, s.p, zero, s.omega, s.F, u, par);
  const QuadStage k2 =
      stage_deriv(s, s.q + 0.5 * dt * k1.dq, s.p + 0.5 * dt * k1.dp, 0.5 * dt * k1.dtheta,
                  s.omega + 0.5 * dt * k1.domega, s.F + 0.5 * dt * k1.dF, u, par);
  const QuadStage k3 =
      stage_deriv(s, s.q + 0.5 * dt * k2.dq, s.p + 0.5 * dt * k2.dp, 0.5 * dt * k2.dtheta,
                  s.omega + 0.5 * dt * k2.domega, s.F + 0.5 * dt * k2.dF, u, par);
  const QuadStage k4 = stage_deriv(s, s.q + dt * k3.dq, s.p + dt * k3.dp, dt * k3.dtheta,
                                   s.omega + dt * k3.domega, s.F + dt * k3.dF, u, par);

  const double w = dt / 6.0;
  QuadrotorState out;
  out.q = s.q + w * (k1.dq + 2.0 * k2.dq + 2.0 * k3.dq + k4.dq);
  out.p = s.p + w * (k1.dp + 2.0 * k2.dp + 2.0 * k3.dp + k4.dp);
  out.omega = s.omega + w * (k1.domega + 2.0 * k2.domega + 2.0 * k3.domega + k4.domega);
  out.F = s.F + w * (k1.dF + 2.0 * k2.dF + 2.0 * k3.dF + k4.dF);
  const Eigen::Vector3d theta = w * (k1.dtheta + 2.0 * k2.dtheta + 2.0 * k3.dtheta + k4.dtheta);
  out.R = s.R * so3_exp(theta);
  orthonormalize(out.R);
  if (out.F < 0.0) out.F = 0.0;
  if (saturated) *saturated = k1.saturated || k2.saturated || k3.saturated || k4.saturated;
  return out;
}

}  // namespace safenav
