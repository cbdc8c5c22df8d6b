#include "safenav/sim.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <sstream>
#include <thread>

#include "safenav/log.hpp"
#include "safenav/rng.hpp"

namespace safenav {

namespace {

long long exact_ratio(double whole, double part, const char* what) {
  const double q = whole / part;
  const long long k = std::llround(q);
  if (k < 1 || std::abs(q - static_cast<double>(k)) > 1e-6)
    throw ConfigError(std::string("scenario: ") + what + " must divide evenly");
  return k;
}

}  // namespace

BarrierConfig ScenarioConfig::barrier_config() const {
  BarrierConfig b;
  b.max_range = lidar.max_range;
  b.eps_a = eps_a;
  b.eps_beta = eps_beta;
  b.rho = rho;
  if (model == ModelKind::Unicycle && lidar.fov < 2.0 * M_PI - 1e-12) b.fov = lidar.fov;
  b.window_n = window_n;
  b.period = lidar.period;
  b.vbar = vbar;
  b.fov_interior_margin = fov_interior_margin;
  return b;
}

ComposerConfig ScenarioConfig::composer_config() const {
  ComposerConfig c;
  c.window_n = window_n;
  c.period = lidar.period;
  c.kappa = kappa;
  c.eta = eta;
  c.variant = variant;
  c.alpha0 = ExtendedClassK::linear(alpha0_gain);
  return c;
}

SystemModel ScenarioConfig::design_model() const {
  return model == ModelKind::Unicycle ? unicycle_model() : double_integrator_model();
}

void ScenarioConfig::validate() const {
  const SystemModel mdl = design_model();
  if (x0.size() != mdl.n) throw ConfigError("scenario: x0 dimension mismatch");
  if (goal.size() != mdl.pos_dim) throw ConfigError("scenario: goal dimension mismatch");
  if (!(duration > 0.0)) throw ConfigError("scenario: duration must be > 0");
  if (!(integrator_dt > 0.0) || !(control_hz > 0.0))
    throw ConfigError("scenario: rates must be positive");
  exact_ratio(1.0 / control_hz, integrator_dt, "control period / integrator step");
  exact_ratio(lidar.period, 1.0 / control_hz, "perception period / control period");
}

// ---------------------------------------------------------------------------
// Plant integration
// ---------------------------------------------------------------------------

namespace {

Vec rk4_step(const SystemModel& mdl, const Vec& x, const Vec& u, double dt) {
  const Vec k1 = mdl.deriv(x, u);
  const Vec k2 = mdl.deriv(x + 0.5 * dt * k1, u);
  const Vec k3 = mdl.deriv(x + 0.5 * dt * k2, u);
  const Vec k4 = mdl.deriv(x + dt * k3, u);
  return x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

struct PlantRunner {
  ModelKind kind;
  SystemModel model;
  QuadrotorParams qpar;
  Vec x;             // design-model state
  QuadrotorState qs;  // quadrotor only

  void init(const ScenarioConfig& cfg) {
    kind = cfg.model;
    model = cfg.design_model();
    x = cfg.x0;
    if (kind == ModelKind::Quadrotor) {
      qs = QuadrotorState::hover(cfg.x0.head(3), qpar);
      qs.p = cfg.x0.tail(3);
    }
  }

  void step(const Vec& u, double dt) {
    if (kind == ModelKind::Quadrotor) {
      qs = quadrotor_step(qs, u, dt, qpar);
      x.head(3) = qs.q;
      x.tail(3) = qs.p;
    } else {
      x = rk4_step(model, x, u, dt);
    }
  }

  double heading() const { return kind == ModelKind::Unicycle ? x(3) : 0.0; }
};

Vec desired_control(const ScenarioConfig& cfg, const SystemModel& mdl, const Vec& x) {
  if (cfg.model == ModelKind::Unicycle)
    return unicycle_desired_control(x, cfg.goal, cfg.k1, cfg.k2, cfg.k3, cfg.goal_radius);
  return quadrotor_desired_control(x.head(mdl.pos_dim), x.tail(mdl.pos_dim), cfg.goal,
                                   cfg.k5, cfg.k6);
}

struct RunOptions {
  bool abort_on_collision = false;
  bool lean_logging = false;  // psi1/filter diagnostics only at control steps
};

TrajectoryLog run_scenario_impl(const ScenarioConfig& cfg, const World& world,
                                const RunOptions& opts) {
  cfg.validate();
  world.validate(cfg.vbar.value_or(0.0));

  const SystemModel mdl = cfg.design_model();
  CompositeBarrier composer(cfg.composer_config());
  const BarrierConfig bcfg = cfg.barrier_config();

  PlantRunner plant;
  plant.init(cfg);

  FilterConfig filter = FilterConfig::minimum_intervention(
      [&cfg, &mdl](double, const Vec& xs) { return desired_control(cfg, mdl, xs); },
      cfg.gamma, ExtendedClassK::linear(cfg.alpha_gain), mdl.m);

  const double dt = cfg.integrator_dt;
  const long long steps_total = std::llround(cfg.duration / dt);
  const long long steps_ctrl = exact_ratio(1.0 / cfg.control_hz, dt, "control period");
  const long long steps_scan = exact_ratio(cfg.lidar.period, dt, "perception period");
  const long long log_stride = dt >= 1e-3 - 1e-12 ? 1 : exact_ratio(1e-3, dt, "log period");

  TrajectoryLog log;

  int k = 0;
  {
    Scan scan0 = ray_cast(world, 0.0, plant.x.head(mdl.pos_dim), plant.heading(), cfg.lidar);
    scan0.index_k = 0;
    composer.push_perception(synthesize_barrier(scan0, bcfg), 0);
    if (!opts.lean_logging) log.scans.push_back(std::move(scan0));
  }
  {
    const PsiChainResult ch0 = composer.eval_psi_chain(0.0, plant.x, mdl);
    if (ch0.psi0 < 0.0 || ch0.psi1 < 0.0) {
      std::ostringstream msg;
      msg << "initial state outside the certified set: psi0(0,x0)=" << ch0.psi0
          << ", psi1(0,x0)=" << ch0.psi1;
      throw PreconditionError(msg.str());
    }
  }

  log.rows.reserve(static_cast<size_t>(steps_total / log_stride) + 2);

  Vec u = Vec::Zero(mdl.m);
  ControlOutput ctrl_out;
  PsiChainResult chain;
  bool have_chain = false;

  for (long long i = 0; i <= steps_total; ++i) {
    const double t = static_cast<double>(i) * dt;

    if (i > 0 && i % steps_scan == 0) {
      ++k;
      Scan scan = ray_cast(world, t, plant.x.head(mdl.pos_dim), plant.heading(), cfg.lidar);
      scan.index_k = k;
      composer.push_perception(synthesize_barrier(scan, bcfg), k);
      if (!opts.lean_logging) log.scans.push_back(std::move(scan));
    }

    const bool ctrl_step = (i % steps_ctrl == 0);
    const bool log_step = (i % log_stride == 0);

    if (ctrl_step || (log_step && !opts.lean_logging)) {
      chain = composer.eval_psi_chain(t, plant.x, mdl);
      have_chain = true;
    }

    if (ctrl_step) {
      ctrl_out = compute_control(t, plant.x, chain, filter);
      u = ctrl_out.u_star;
      if (ctrl_out.assumption_warning || chain.hull_condition_violated)
        ++log.assumption_warnings;
    }

    if (log_step) {
      LogRow row;
      row.t = t;
      row.state = plant.x;
      row.u_d = desired_control(cfg, mdl, plant.x);
      row.u = u;
      row.k = k;
      row.control_step = ctrl_step;
      row.clearance = min_clearance(world, t, plant.x.head(mdl.pos_dim));
      const Vec xdot = mdl.deriv(plant.x, u);
      if (have_chain && (ctrl_step || !opts.lean_logging)) {
        row.psi0 = chain.psi0;
        row.psi1 = chain.psi1;
        row.dpsi0_dt = chain.dpsi0_dt;
        row.dpsi0_dtt = chain.dpsi0_dtt;
        row.dpsi0_total = chain.dpsi0_dt + chain.grad_psi0.dot(xdot);
        row.grad_psi0_norm = chain.grad_psi0.norm();
        row.dt_grad_psi0_norm = chain.dt_grad_psi0.norm();
        row.mu_sum = 0.0;
        row.mu_min = 1.0;
        for (double w : chain.mu) {
          row.mu_sum += w;
          row.mu_min = std::min(row.mu_min, w);
        }
      } else {
        row.psi0 = composer.eval_psi0_value(t, plant.x);
        row.psi1 = chain.psi1;  // held from the last control step
      }
      row.state_rate_norm = xdot.norm();
      row.lambda = ctrl_out.lambda;
      row.mu_star = ctrl_out.mu_star;
      row.omega = ctrl_out.omega;
      row.d = ctrl_out.d;
      row.assumption_warning = ctrl_out.assumption_warning;
      log.rows.push_back(std::move(row));

      if (opts.abort_on_collision && log.rows.back().clearance < 0.0) break;
    }

    if (i < steps_total) plant.step(u, dt);
  }

  log.metrics = compute_metrics(log.rows, cfg.goal, cfg.goal_tolerance);
  log.min_psi1 = std::numeric_limits<double>::infinity();
  log.min_clearance = std::numeric_limits<double>::infinity();
  for (const auto& row : log.rows) {
    log.min_psi1 = std::min(log.min_psi1, row.psi1);
    log.min_clearance = std::min(log.min_clearance, row.clearance);
  }
  return log;
}

}  // namespace

TrajectoryLog run_scenario(const ScenarioConfig& cfg, const World& world) {
  return run_scenario_impl(cfg, world, RunOptions{});
}

Metrics compute_metrics(const std::vector<LogRow>& rows, const Vec& goal,
                        double goal_tolerance) {
  if (rows.empty()) throw std::invalid_argument("compute_metrics: empty log");
  Metrics m;
  const Eigen::Index pos_dim = goal.size();
  const Eigen::Index nu = rows.front().u.size();

  m.min_psi0 = std::numeric_limits<double>::infinity();
  Vec sq = Vec::Zero(nu);
  bool collided = false;
  for (const auto& row : rows) {
    m.min_psi0 = std::min(m.min_psi0, row.psi0);
    collided = collided || row.clearance < 0.0;
    const Vec du = row.u - row.u_d;
    sq += du.cwiseProduct(du);
  }
  m.collided = collided;
  m.rms_u = (sq / static_cast<double>(rows.size())).cwiseSqrt();

  // first time after which the goal ball is never left
  std::ptrdiff_t last_outside = -1;
  for (std::ptrdiff_t i = static_cast<std::ptrdiff_t>(rows.size()) - 1; i >= 0; --i) {
    if ((rows[static_cast<size_t>(i)].state.head(pos_dim) - goal).norm() > goal_tolerance) {
      last_outside = i;
      break;
    }
  }
  if (last_outside < 0) {
    m.settling_time_s = rows.front().t;
    m.reached = true;
  } else if (last_outside + 1 < static_cast<std::ptrdiff_t>(rows.size())) {
    m.settling_time_s = rows[static_cast<size_t>(last_outside + 1)].t;
    m.reached = true;
  } else {
    m.settling_time_s = std::numeric_limits<double>::infinity();
    m.reached = false;
  }
  return m;
}

// ---------------------------------------------------------------------------
// Monte Carlo
// ---------------------------------------------------------------------------

BoxStats box_stats(std::vector<double> samples) {
  BoxStats bs;
  bs.count = static_cast<int>(samples.size());
  if (samples.empty()) return bs;
  std::sort(samples.begin(), samples.end());
  const auto pct = [&](double p) {
    const double idx = p * (samples.size() - 1);
    const size_t lo = static_cast<size_t>(std::floor(idx));
    const size_t hi = static_cast<size_t>(std::ceil(idx));
    const double w = idx - static_cast<double>(lo);
    return (1.0 - w) * samples[lo] + w * samples[hi];
  };
  bs.median = pct(0.5);
  bs.p25 = pct(0.25);
  bs.p75 = pct(0.75);
  bs.p10 = pct(0.10);
  bs.p90 = pct(0.90);
  return bs;
}

namespace {

std::uint64_t trial_seed(std::uint64_t seed, int n_obstacles, int trial) {
  SplitMix64 mix(seed);
  return mix.fork(static_cast<std::uint64_t>(n_obstacles))
      .fork(static_cast<std::uint64_t>(trial))
      .state;
}

TrialOutcome run_one_trial(const ScenarioConfig& base, const World& base_world,
                           int n_obstacles, std::uint64_t seed) {
  SplitMix64 rng(seed);
  const SystemModel mdl = base.design_model();
  const int dim = mdl.pos_dim;
  const double inset = 1.5;
  const double obstacle_radius = 0.6;

  TrialOutcome out;
  for (int attempt = 0; attempt < 20; ++attempt) {
    ScenarioConfig cfg = base;
    World world = base_world;
    world.dynamic.clear();

    Vec lo = base_world.bounds_min, hi = base_world.bounds_max;
    const auto sample_point = [&](double margin) {
      Vec p(dim);
      for (int i = 0; i < dim; ++i) p(i) = rng.uniform(lo(i) + margin, hi(i) - margin);
      return p;
    };

    const Vec q0 = sample_point(inset);
    Vec goal = sample_point(inset);
    for (int tries = 0; tries < 50 && (goal - q0).norm() < 6.0; ++tries) goal = sample_point(inset);

    cfg.goal = goal;
    cfg.x0 = Vec::Zero(mdl.n);
    cfg.x0.head(dim) = q0;
    if (base.model == ModelKind::Unicycle) cfg.x0(3) = rng.uniform(0.0, 2.0 * M_PI);

    const double vbar = base.vbar.value_or(0.5);
    for (int j = 0; j < n_obstacles; ++j) {
      DynamicObstacle obs;
      obs.radius = obstacle_radius;
      obs.speed = vbar * std::max(rng.uniform(), 1e-3);  // uniform on (0, vbar]
      Vec start = sample_point(inset);
      for (int tries = 0; tries < 50 && (start - q0).norm() < 2.0; ++tries)
        start = sample_point(inset);
      obs.waypoints.push_back(start);
      for (int w = 0; w < 6; ++w) obs.waypoints.push_back(sample_point(inset));
      world.dynamic.push_back(std::move(obs));
    }

    RunOptions opts;
    opts.abort_on_collision = true;
    opts.lean_logging = true;
    TrajectoryLog log;
    try {
      log = run_scenario_impl(cfg, world, opts);
    } catch (const PreconditionError&) {
      continue;  // resample: spawned too close to something
    } catch (const SynthesisError&) {
      continue;
    }

    out.safe = log.min_clearance >= 0.0;
    out.reached = log.metrics.reached;
    out.assumption_warned = log.assumption_warnings > 0;
    out.min_psi0 = log.metrics.min_psi0;
    out.settling_time_s = log.metrics.settling_time_s;
    out.rms_u = log.metrics.rms_u;
    return out;
  }
  out.precondition_failed = true;
  out.rms_u = Vec::Zero(mdl.m);
  return out;
}

}  // namespace

std::vector<TrialOutcome> monte_carlo_trials(const ScenarioConfig& cfg_template,
                                             const World& base_world, int n_obstacles,
                                             int trials, int jobs, std::uint64_t seed) {
  if (trials < 1) throw ConfigError("monte_carlo: trials must be >= 1");
  std::vector<TrialOutcome> results(static_cast<size_t>(trials));
  std::atomic<int> next{0};
  const int workers = std::max(1, std::min(jobs, trials));
  std::vector<std::thread> pool;
  pool.reserve(static_cast<size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (int i = next.fetch_add(1); i < trials; i = next.fetch_add(1)) {
        results[static_cast<size_t>(i)] =
            run_one_trial(cfg_template, base_world, n_obstacles, trial_seed(seed, n_obstacles, i));
      }
    });
  }
  for (auto& th : pool) th.join();
  return results;
}

MonteCarloRow monte_carlo(const ScenarioConfig& cfg_template, const World& base_world,
                          int n_obstacles, int trials, int jobs, std::uint64_t seed) {
  const auto results = monte_carlo_trials(cfg_template, base_world, n_obstacles, trials, jobs, seed);

  MonteCarloRow row;
  row.n_obstacles = n_obstacles;
  row.trials = trials;
  std::vector<double> min_psi0, settling, rms0, rms1;
  int safe = 0, successful = 0;
  for (const auto& r : results) {
    if (r.precondition_failed) {
      ++row.timed_out;
      continue;
    }
    if (r.safe)
      ++safe;
    else
      ++row.collided;
    if (r.assumption_warned) ++row.assumption_warned;
    if (r.safe && r.reached) {
      ++successful;
      min_psi0.push_back(r.min_psi0);
      settling.push_back(r.settling_time_s);
      if (r.rms_u.size() > 0) rms0.push_back(r.rms_u(0));
      if (r.rms_u.size() > 1) rms1.push_back(r.rms_u(1));
    } else if (r.safe) {
      ++row.timed_out;
    }
  }
  row.percent_safe = 100.0 * static_cast<double>(safe) / trials;
  row.percent_successful = 100.0 * static_cast<double>(successful) / trials;
  row.min_psi0 = box_stats(std::move(min_psi0));
  row.settling = box_stats(std::move(settling));
  row.rms_u0 = box_stats(std::move(rms0));
  row.rms_u1 = box_stats(std::move(rms1));
  log_info("monte carlo n=%d: safe %.1f%%, successful %.1f%%", n_obstacles, row.percent_safe,
           row.percent_successful);
  return row;
}

}  // namespace safenav
