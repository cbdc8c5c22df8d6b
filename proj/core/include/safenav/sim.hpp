#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "safenav/composer.hpp"
#include "safenav/controller.hpp"
#include "safenav/world.hpp"

namespace safenav {

enum class ModelKind { Unicycle, DoubleIntegrator, Quadrotor };

/// Full experiment description. The quadrotor runs its attitude-stabilized
/// plant while the filter works on the double-integrator design model.
struct ScenarioConfig {
  std::string name;
  ModelKind model = ModelKind::Unicycle;
  std::string world_ref;  // world file path or builtin name

  Vec x0;    // design-model initial state
  Vec goal;  // goal position

  LidarSpec lidar;

  // composer
  int window_n = 1;
  double kappa = 30.0;
  SmoothstepSpec eta;
  CompositionVariant variant = CompositionVariant::InnerBlend;

  // filter
  double gamma = 200.0;
  double alpha_gain = 50.0;   // constraint-side gain
  double alpha0_gain = 35.0;  // chain gain

  // barrier synthesis
  double rho = 30.0;
  double eps_a = 0.15;
  double eps_beta = 0.15;
  std::optional<double> vbar;  // enables the dynamic-margin rule
  double fov_interior_margin = 0.02;

  // goal-seeking gains
  double k1 = 0.5, k2 = 3.0, k3 = 3.0;  // unicycle
  double k5 = 3.0, k6 = 2.0;            // double integrator / quadrotor
  double goal_radius = 0.05;
  double goal_tolerance = 0.1;  // settling-time ball

  // rates
  double control_hz = 100.0;
  double integrator_dt = 1e-3;

  double duration = 20.0;
  std::uint64_t seed = 0;

  BarrierConfig barrier_config() const;
  ComposerConfig composer_config() const;
  SystemModel design_model() const;
  void validate() const;
};

struct LogRow {
  double t = 0.0;
  Vec state;  // design-model state
  Vec u_d;
  Vec u;
  double psi0 = 0.0, psi1 = 0.0;
  double lambda = 0.0, mu_star = 0.0, omega = 0.0, d = 0.0;
  double clearance = 0.0;
  int k = 0;

  // diagnostics carried in memory for verification, not part of the CSV
  double dpsi0_dt = 0.0, dpsi0_dtt = 0.0;
  double dpsi0_total = 0.0;  // d/dt of psi0 along the trajectory under the held control
  double grad_psi0_norm = 0.0, dt_grad_psi0_norm = 0.0;
  double state_rate_norm = 0.0;  // ||xdot|| under the held control
  double mu_sum = 0.0, mu_min = 0.0;
  bool control_step = false;
  bool assumption_warning = false;
};

struct Metrics {
  double settling_time_s = std::numeric_limits<double>::infinity();
  Vec rms_u;  // per input channel, u - u_d
  double min_psi0 = 0.0;
  bool collided = false;
  bool reached = false;
};

struct TrajectoryLog {
  std::vector<LogRow> rows;
  std::vector<Scan> scans;  // every perception snapshot, in capture order
  Metrics metrics;
  double min_psi1 = 0.0;
  double min_clearance = 0.0;
  int assumption_warnings = 0;
};

/// Closed-loop sampled-data run: fixed-step integration, zero-order-hold
/// control, perception refresh every lidar.period seconds (pushed before the
/// control update that lands on the same instant), rows logged at 1 kHz.
TrajectoryLog run_scenario(const ScenarioConfig& cfg, const World& world);

Metrics compute_metrics(const std::vector<LogRow>& rows, const Vec& goal,
                        double goal_tolerance = 0.1);

// ---------------------------------------------------------------------------
// Monte Carlo study
// ---------------------------------------------------------------------------

struct BoxStats {
  double median = 0.0, p25 = 0.0, p75 = 0.0, p10 = 0.0, p90 = 0.0;
  int count = 0;
};
BoxStats box_stats(std::vector<double> samples);

struct TrialOutcome {
  bool safe = false;
  bool reached = false;
  bool precondition_failed = false;
  bool assumption_warned = false;
  double min_psi0 = 0.0;
  double settling_time_s = std::numeric_limits<double>::infinity();
  Vec rms_u;
};

struct MonteCarloRow {
  int n_obstacles = 0;
  int trials = 0;
  double percent_safe = 0.0;
  double percent_successful = 0.0;
  int collided = 0, timed_out = 0, assumption_warned = 0;
  BoxStats min_psi0, settling, rms_u0, rms_u1;
};

/// Seeded randomized trials at a fixed obstacle count: initial state, goal,
/// and obstacle trajectories are drawn per trial from an independent stream,
/// so results do not depend on the number of worker threads. The template
/// world keeps its static geometry; its dynamic obstacles are replaced by
/// n_obstacles random ones.
MonteCarloRow monte_carlo(const ScenarioConfig& cfg_template, const World& base_world,
                          int n_obstacles, int trials, int jobs, std::uint64_t seed);

/// Per-trial outcomes in trial order (used by tests and aggregation).
std::vector<TrialOutcome> monte_carlo_trials(const ScenarioConfig& cfg_template,
                                             const World& base_world, int n_obstacles,
                                             int trials, int jobs, std::uint64_t seed);

}  // namespace safenav
