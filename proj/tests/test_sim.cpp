#include <doctest.h>

#include <cmath>

#include "safenav/scenario_io.hpp"
#include "safenav/sim.hpp"

using namespace safenav;

namespace {

// free-space scenario: no obstacles, goal straight ahead
ScenarioBundle free_space() {
  ScenarioBundle bundle = builtin_scenario("ground_static");
  bundle.world.circles.clear();
  bundle.world.polygons.clear();
  bundle.world.chains.clear();
  bundle.config.duration = 6.0;
  return bundle;
}

}  // namespace

TEST_CASE("free-space run matches an independent integration of the nominal loop") {
  const ScenarioBundle bundle = free_space();
  const TrajectoryLog log = run_scenario(bundle.config, bundle.world);

  // oracle: plain sampled-data loop with the raw goal-seeking law, no filter
  const SystemModel mdl = bundle.config.design_model();
  Vec x = bundle.config.x0;
  const double dt = bundle.config.integrator_dt;
  const long long steps = std::llround(bundle.config.duration / dt);
  const long long per_ctrl = std::llround(1.0 / (bundle.config.control_hz * dt));
  Vec u = Vec::Zero(mdl.m);
  double worst = 0.0;
  for (long long i = 0; i <= steps; ++i) {
    if (i % per_ctrl == 0)
      u = unicycle_desired_control(x, bundle.config.goal, bundle.config.k1, bundle.config.k2,
                                   bundle.config.k3, bundle.config.goal_radius);
    worst = std::max(worst, (x - log.rows[static_cast<size_t>(i)].state).norm());
    if (i < steps) {
      const Vec k1 = mdl.deriv(x, u);
      const Vec k2 = mdl.deriv(x + 0.5 * dt * k1, u);
      const Vec k3 = mdl.deriv(x + 0.5 * dt * k2, u);
      const Vec k4 = mdl.deriv(x + dt * k3, u);
      x += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
  }
  CHECK(worst < 1e-8);  // the filter never engages in free space
  for (const auto& row : log.rows) CHECK(row.lambda == 0.0);
}

TEST_CASE("initial state outside the certified set is a precondition error") {
  ScenarioBundle bundle = builtin_scenario("ground_static");
  bundle.config.x0(0) = 6.95;  // just inside the first circle's rim
  bundle.config.x0(1) = 3.4;
  CHECK_THROWS_AS(run_scenario(bundle.config, bundle.world), PreconditionError);
}

TEST_CASE("malformed rate configuration is rejected") {
  ScenarioBundle bundle = free_space();
  bundle.config.control_hz = 7.3;  // does not divide the integrator step evenly
  CHECK_THROWS_AS(run_scenario(bundle.config, bundle.world), ConfigError);
}

TEST_CASE("halving the integrator step barely moves the final state") {
  ScenarioBundle bundle = builtin_scenario("ground_static");
  bundle.config.duration = 4.0;
  const TrajectoryLog coarse = run_scenario(bundle.config, bundle.world);
  bundle.config.integrator_dt *= 0.5;
  const TrajectoryLog fine = run_scenario(bundle.config, bundle.world);
  CHECK((coarse.rows.back().state - fine.rows.back().state).norm() < 1e-4);
}

TEST_CASE("runs are deterministic") {
  ScenarioBundle bundle = builtin_scenario("ground_dynamic");
  bundle.config.duration = 3.0;
  const TrajectoryLog a = run_scenario(bundle.config, bundle.world);
  const TrajectoryLog b = run_scenario(bundle.config, bundle.world);
  REQUIRE(a.rows.size() == b.rows.size());
  for (size_t i = 0; i < a.rows.size(); i += 97) {
    CHECK(a.rows[i].state == b.rows[i].state);
    CHECK(a.rows[i].psi0 == b.rows[i].psi0);
  }
}

TEST_CASE("perception lands before the control update at shared instants") {
  ScenarioBundle bundle = builtin_scenario("ground_static");
  bundle.config.duration = 1.0;
  const TrajectoryLog log = run_scenario(bundle.config, bundle.world);
  // rows at multiples of the perception period already carry the new epoch
  const double T = bundle.config.lidar.period;
  for (const auto& row : log.rows) {
    const int expected = static_cast<int>(std::floor(row.t / T + 1e-9));
    CHECK(row.k == expected);
  }
}

TEST_CASE("metrics: settling, rms, and flags from a hand-built log") {
  std::vector<LogRow> rows(3);
  Vec goal(2);
  goal << 1.0, 0.0;
  for (int i = 0; i < 3; ++i) {
    rows[i].t = 0.5 * i;
    rows[i].state = Vec::Zero(4);
    rows[i].u = Vec::Zero(2);
    rows[i].u_d = Vec::Zero(2);
    rows[i].psi0 = 1.0 + i;
    rows[i].clearance = 1.0;
  }
  rows[0].state(0) = 0.0;
  rows[1].state(0) = 0.95;  // inside the goal ball from here on
  rows[2].state(0) = 1.02;
  rows[1].u << 1.0, 0.0;
  rows[1].u_d << 0.0, 2.0;

  const Metrics m = compute_metrics(rows, goal, 0.1);
  CHECK(m.settling_time_s == doctest::Approx(0.5));
  CHECK(m.reached);
  CHECK(!m.collided);
  CHECK(m.min_psi0 == doctest::Approx(1.0));
  CHECK(m.rms_u(0) == doctest::Approx(std::sqrt(1.0 / 3.0)).epsilon(1e-12));
  CHECK(m.rms_u(1) == doctest::Approx(std::sqrt(4.0 / 3.0)).epsilon(1e-12));

  SUBCASE("never settling yields the infinite sentinel") {
    rows[2].state(0) = 5.0;
    const Metrics m2 = compute_metrics(rows, goal, 0.1);
    CHECK(!m2.reached);
    CHECK(std::isinf(m2.settling_time_s));
  }
  SUBCASE("matched control has exactly zero deviation") {
    rows[1].u_d = rows[1].u;
    const Metrics m3 = compute_metrics(rows, goal, 0.1);
    CHECK(m3.rms_u(0) == 0.0);
    CHECK(m3.rms_u(1) == doctest::Approx(0.0));
  }
  SUBCASE("negative clearance marks a collision") {
    rows[1].clearance = -0.01;
    CHECK(compute_metrics(rows, goal, 0.1).collided);
  }
}

TEST_CASE("box stats: percentiles of a known sample") {
  const BoxStats b = box_stats({5.0, 1.0, 3.0, 2.0, 4.0});
  CHECK(b.median == doctest::Approx(3.0));
  CHECK(b.p25 == doctest::Approx(2.0));
  CHECK(b.p75 == doctest::Approx(4.0));
  CHECK(b.p10 == doctest::Approx(1.4));
  CHECK(b.p90 == doctest::Approx(4.6));
  CHECK(b.count == 5);
  CHECK(box_stats({}).count == 0);
}

TEST_CASE("empty-map trials are all safe and successful") {
  ScenarioBundle bundle = builtin_scenario("ground_dynamic");
  bundle.world.dynamic.clear();
  bundle.config.duration = 12.0;
  const MonteCarloRow row = monte_carlo(bundle.config, bundle.world, 0, 8, 2, 7);
  CHECK(row.percent_safe == doctest::Approx(100.0));
  CHECK(row.percent_successful == doctest::Approx(100.0));
  CHECK(row.collided == 0);
}

TEST_CASE("trial streams are independent of the worker count") {
  const ScenarioBundle bundle = builtin_scenario("ground_dynamic");
  const auto a = monte_carlo_trials(bundle.config, bundle.world, 4, 6, 1, 99);
  const auto b = monte_carlo_trials(bundle.config, bundle.world, 4, 6, 2, 99);
  REQUIRE(a.size() == b.size());
  for (size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].safe == b[i].safe);
    CHECK(a[i].reached == b[i].reached);
    CHECK(a[i].min_psi0 == b[i].min_psi0);  // bit identical
    CHECK(a[i].settling_time_s == b[i].settling_time_s);
  }
}
