#include <doctest.h>

#include <cmath>

#include "safenav/rng.hpp"
#include "safenav/systems.hpp"

using namespace safenav;

namespace {

void check_jacobian(const SystemModel& mdl, const Vec& x) {
  const Mat j = mdl.jac_f(x);
  const double h = 1e-6;
  Vec xp = x;
  for (int i = 0; i < mdl.n; ++i) {
    xp(i) = x(i) + h;
    const Vec fp = mdl.f(xp);
    xp(i) = x(i) - h;
    const Vec fm = mdl.f(xp);
    xp(i) = x(i);
    const Vec col = (fp - fm) / (2.0 * h);
    CHECK((col - j.col(i)).norm() <= 1e-5 * std::max(1.0, j.norm()));
  }
}

}  // namespace

TEST_CASE("unicycle drift and jacobian") {
  const SystemModel mdl = unicycle_model();
  Vec x(4);
  x << 0.0, 0.0, 1.0, 0.0;
  const Vec f = mdl.f(x);
  CHECK(f(0) == doctest::Approx(1.0));
  CHECK(f(1) == doctest::Approx(0.0));
  CHECK(f(2) == 0.0);
  CHECK(f(3) == 0.0);

  x << 0.0, 0.0, 1.0, M_PI / 2.0;
  CHECK(mdl.jac_f(x)(0, 3) == doctest::Approx(-1.0));  // d(v cos th)/d th = -v sin th

  SplitMix64 rng(3);
  for (int it = 0; it < 100; ++it) {
    Vec xs(4);
    xs << rng.normal(), rng.normal(), 2.0 * rng.normal(), rng.uniform(0.0, 2.0 * M_PI);
    check_jacobian(mdl, xs);
  }
}

TEST_CASE("position fields have no direct input coupling on either plant") {
  // the input map touches only the non-position states, so any barrier that
  // reads positions alone has relative degree two
  for (const SystemModel& mdl : {unicycle_model(), double_integrator_model()}) {
    const Mat g = mdl.g(Vec::Zero(mdl.n));
    CHECK(g.topRows(mdl.pos_dim).norm() == 0.0);
  }
}

TEST_CASE("double integrator drift, input map, jacobian") {
  const SystemModel mdl = double_integrator_model();
  Vec x(6);
  x << 1.0, 2.0, 3.0, 0.1, 0.2, 0.3;
  const Vec f = mdl.f(x);
  CHECK(f(0) == doctest::Approx(0.1));
  CHECK(f(1) == doctest::Approx(0.2));
  CHECK(f(2) == doctest::Approx(0.3));
  CHECK(f.tail(3).norm() == 0.0);

  Mat expected = Mat::Zero(6, 6);
  expected.topRightCorner(3, 3) = Mat::Identity(3, 3);
  CHECK((mdl.jac_f(x) - expected).norm() == 0.0);

  // Lg Lf of a position field is the field's position gradient
  Vec grad = Vec::Zero(6);
  grad.head(3) << 0.5, -1.0, 2.0;
  Mat hess = Mat::Zero(6, 6);
  const Vec lglf = mdl.g(x).transpose() * (hess * mdl.f(x) + mdl.jac_f(x).transpose() * grad);
  CHECK((lglf - grad.head(3)).norm() < 1e-14);
}

TEST_CASE("unicycle goal-seeking law: pinned values") {
  Vec x(4);
  x << 0.0, 0.0, 0.0, 0.0;
  Vec qg(2);
  qg << 1.0, 0.0;
  const Vec u = unicycle_desired_control(x, qg, 0.5, 3.0, 3.0);
  CHECK(u(0) == doctest::Approx(2.5).epsilon(1e-12));
  CHECK(u(1) == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));

  // collapse case: aligned with zero speed -> (1 + k1 k3) * dist
  Vec x2(4);
  x2 << 3.0, 4.0, 0.0, std::atan2(-4.0, -3.0);  // heading straight at the origin
  Vec origin = Vec::Zero(2);
  const Vec u2 = unicycle_desired_control(x2, origin, 0.5, 3.0, 3.0);
  CHECK(u2(0) == doctest::Approx((1.0 + 1.5) * 5.0).epsilon(1e-9));
  CHECK(u2(1) == doctest::Approx(0.0).scale(1.0).epsilon(1e-9));

  // inside the goal ball the law switches off
  Vec x3(4);
  x3 << 0.01, 0.0, 1.0, 0.3;
  CHECK(unicycle_desired_control(x3, origin, 0.5, 3.0, 3.0).norm() == 0.0);
}

TEST_CASE("saturated PD law: pinned values") {
  Vec q = Vec::Zero(3), p = Vec::Zero(3), qg = Vec::Zero(3);
  CHECK(quadrotor_desired_control(q, p, qg, 3.0, 2.0).norm() == 0.0);

  qg << 10.0, 0.0, 0.0;
  const Vec u = quadrotor_desired_control(q, p, qg, 3.0, 2.0);
  CHECK(u(0) == doctest::Approx(3.0 * std::tanh(10.0)).epsilon(1e-12));
  CHECK(u(0) == doctest::Approx(3.0).epsilon(1e-6));

  qg.setZero();
  p << 1.0, 1.0, 1.0;
  const Vec u2 = quadrotor_desired_control(q, p, qg, 3.0, 2.0);
  for (int i = 0; i < 3; ++i) CHECK(u2(i) == doctest::Approx(-2.0).epsilon(1e-12));
}

TEST_CASE("attitude command: hover and pinned tilt") {
  const QuadrotorParams par;
  const AttitudeCommand hover = quadrotor_attitude_command(Eigen::Vector3d::Zero(), par);
  CHECK(hover.theta_c == doctest::Approx(0.0));
  CHECK(hover.phi_c == doctest::Approx(0.0));
  CHECK(hover.thrust_c == doctest::Approx(0.981).epsilon(1e-12));
  CHECK(!hover.saturated);

  const AttitudeCommand tilt =
      quadrotor_attitude_command(Eigen::Vector3d(par.gravity, 0.0, 0.0), par);
  CHECK(tilt.theta_c == doctest::Approx(M_PI / 4.0).epsilon(1e-12));

  const AttitudeCommand hard =
      quadrotor_attitude_command(Eigen::Vector3d(1000.0, 0.0, 0.0), par);
  CHECK(hard.saturated);
  CHECK(std::abs(hard.theta_c) <= par.tilt_limit + 1e-12);
}

TEST_CASE("hover equilibrium has zero derivatives") {
  const QuadrotorParams par;
  const QuadrotorState s = QuadrotorState::hover(Eigen::Vector3d(1.0, 2.0, 3.0), par);
  const QuadrotorDeriv d = quadrotor_derivative(s, Eigen::Vector3d::Zero(), par);
  CHECK(d.dq.norm() == 0.0);
  CHECK(d.dp.norm() < 1e-12);
  CHECK(d.dR.norm() == 0.0);
  CHECK(d.domega.norm() < 1e-12);
  CHECK(d.dF == doctest::Approx(0.0).scale(1.0).epsilon(1e-9));
}

TEST_CASE("rotation stays orthonormal over a long hover") {
  const QuadrotorParams par;
  QuadrotorState s = QuadrotorState::hover(Eigen::Vector3d::Zero(), par);
  s.omega << 0.1, -0.05, 0.2;  // initial wobble
  const double dt = 2e-4;
  double worst = 0.0;
  for (int i = 0; i < 100000; ++i) {  // 20 s
    s = quadrotor_step(s, Eigen::Vector3d::Zero(), dt, par);
    if (i % 1000 == 0)
      worst = std::max(worst,
                       (s.R.transpose() * s.R - Eigen::Matrix3d::Identity()).norm());
  }
  CHECK(worst < 1e-6);
  CHECK(s.F >= 0.0);
  // wobble damped out
  CHECK(s.omega.norm() < 1e-3);
  CHECK(s.p.norm() < 0.05);
}

TEST_CASE("step response tracks the double-integrator design model") {
  const QuadrotorParams par;
  QuadrotorState s = QuadrotorState::hover(Eigen::Vector3d::Zero(), par);
  const Eigen::Vector3d u(0.5, -0.3, 0.2);
  const double dt = 2e-4;
  const double duration = 2.0;
  const int steps = static_cast<int>(duration / dt);

  double err_sq = 0.0, ref_sq = 0.0;
  for (int i = 1; i <= steps; ++i) {
    s = quadrotor_step(s, u, dt, par);
    const double t = i * dt;
    const Eigen::Vector3d q_ref = 0.5 * t * t * u;  // double integrator from rest
    err_sq += (s.q - q_ref).squaredNorm();
    ref_sq += q_ref.squaredNorm();
  }
  CHECK(std::sqrt(err_sq) <= 0.05 * std::sqrt(ref_sq));
}

TEST_CASE("exponential map on so(3) against small-angle and known rotations") {
  CHECK((so3_exp(Eigen::Vector3d::Zero()) - Eigen::Matrix3d::Identity()).norm() == 0.0);
  const Eigen::Matrix3d r = so3_exp(Eigen::Vector3d(0.0, 0.0, M_PI / 2.0));
  CHECK(r(0, 0) == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
  CHECK(r(0, 1) == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(r(1, 0) == doctest::Approx(1.0).epsilon(1e-12));
  SplitMix64 rng(6);
  for (int it = 0; it < 100; ++it) {
    const Eigen::Vector3d w(rng.normal(), rng.normal(), rng.normal());
    const Eigen::Matrix3d e = so3_exp(w);
    CHECK((e.transpose() * e - Eigen::Matrix3d::Identity()).norm() < 1e-12);
    CHECK(e.determinant() == doctest::Approx(1.0).epsilon(1e-12));
  }
}
