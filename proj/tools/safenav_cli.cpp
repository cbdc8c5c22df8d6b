// Command-line front end: closed-loop scenario runs, Monte Carlo sweeps over
// dynamic-obstacle counts, and the verification suites.

#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "safenav/log.hpp"
#include "safenav/scenario_io.hpp"
#include "safenav/sim.hpp"
#include "safenav/verify.hpp"

namespace {

using namespace safenav;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitCollision = 2;
constexpr int kExitPrecondition = 3;

int cmd_run(const std::string& scenario_path, const std::string& out_dir,
            std::uint64_t seed, bool seed_given) {
  ScenarioBundle bundle;
  try {
    bundle = load_scenario(scenario_path);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitConfig;
  }
  if (seed_given) bundle.config.seed = seed;

  TrajectoryLog log;
  try {
    log = run_scenario(bundle.config, bundle.world);
  } catch (const PreconditionError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitPrecondition;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitConfig;
  }

  std::filesystem::create_directories(out_dir);
  const std::filesystem::path dir(out_dir);
  write_trajectory_csv((dir / "trajectory.csv").string(), log);
  write_metrics_json((dir / "metrics.json").string(), log.metrics);
  write_scans_csv((dir / "scans.csv").string(), log.scans);

  const Metrics& m = log.metrics;
  std::printf("scenario      %s\n", bundle.config.name.c_str());
  std::printf("rows          %zu\n", log.rows.size());
  if (m.reached)
    std::printf("settling_time %.3f s\n", m.settling_time_s);
  else
    std::printf("settling_time (not reached)\n");
  std::printf("min_psi0      %.6f\n", m.min_psi0);
  std::printf("min_psi1      %.6f\n", log.min_psi1);
  std::printf("min_clearance %.6f\n", log.min_clearance);
  for (Eigen::Index i = 0; i < m.rms_u.size(); ++i)
    std::printf("rms_u%d        %.6f\n", static_cast<int>(i), m.rms_u(i));
  std::printf("collided      %s\n", m.collided ? "true" : "false");
  std::printf("reached       %s\n", m.reached ? "true" : "false");
  if (log.assumption_warnings > 0)
    std::printf("warnings      %d assumption warnings\n", log.assumption_warnings);

  return m.collided ? kExitCollision : kExitOk;
}

bool parse_obstacle_range(const std::string& text, std::vector<int>& counts) {
  const auto dots = text.find("..");
  try {
    if (dots == std::string::npos) {
      counts.push_back(std::stoi(text));
      return true;
    }
    const int lo = std::stoi(text.substr(0, dots));
    const int hi = std::stoi(text.substr(dots + 2));
    if (hi < lo) return false;
    for (int i = lo; i <= hi; ++i) counts.push_back(i);
    return true;
  } catch (const std::exception&) {
    return false;
  }
}

int cmd_montecarlo(const std::string& scenario_path, const std::string& obstacles,
                   int trials, int jobs, std::uint64_t seed, const std::string& out_dir) {
  std::vector<int> counts;
  if (!parse_obstacle_range(obstacles, counts) || counts.empty()) {
    std::fprintf(stderr, "error: bad --obstacles range '%s' (expected a or a..b)\n",
                 obstacles.c_str());
    return kExitConfig;
  }
  ScenarioBundle bundle;
  try {
    bundle = load_scenario(scenario_path);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitConfig;
  }

  std::vector<MonteCarloRow> rows;
  for (int n : counts) {
    rows.push_back(monte_carlo(bundle.config, bundle.world, n, trials, jobs, seed));
    const MonteCarloRow& r = rows.back();
    std::printf("obstacles %2d: safe %5.1f%%  successful %5.1f%%  (collided %d, timed out %d)\n",
                r.n_obstacles, r.percent_safe, r.percent_successful, r.collided, r.timed_out);
  }

  std::filesystem::create_directories(out_dir);
  write_montecarlo_outputs(out_dir, rows);
  return kExitOk;
}

int cmd_verify(const std::string& suite, std::uint64_t seed) {
  std::vector<SuiteReport> reports;
  try {
    if (suite == "softmath")
      reports.push_back(verify_softmath(seed));
    else if (suite == "jets")
      reports.push_back(verify_jets(seed));
    else if (suite == "controller")
      reports.push_back(verify_controller(seed));
    else if (suite == "invariance")
      reports.push_back(verify_invariance(seed));
    else
      reports = verify_all(seed);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitConfig;
  }

  bool all_pass = true;
  for (const auto& report : reports) {
    std::printf("suite %s\n", report.suite.c_str());
    for (const auto& check : report.checks) {
      std::printf("  [%s] %s (%s)\n", check.pass ? "PASS" : "FAIL", check.name.c_str(),
                  check.detail.c_str());
      all_pass = all_pass && check.pass;
    }
  }
  return all_pass ? kExitOk : kExitConfig;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Perception-driven safety-filtered navigation simulator"};
  app.require_subcommand(1);

  std::string scenario_path, out_dir, obstacles, suite = "all";
  std::uint64_t seed = 0;
  int trials = 200, jobs = 1;

  CLI::App* run = app.add_subcommand("run", "Run one closed-loop scenario");
  run->add_option("--scenario", scenario_path, "Scenario file")->required();
  run->add_option("--out", out_dir, "Output directory")->required();
  CLI::Option* run_seed = run->add_option("--seed", seed, "Override the scenario seed");

  CLI::App* mc = app.add_subcommand("montecarlo", "Randomized trials over obstacle counts");
  mc->add_option("--scenario", scenario_path, "Scenario template file")->required();
  mc->add_option("--obstacles", obstacles, "Obstacle count or range a..b")->required();
  mc->add_option("--trials", trials, "Trials per obstacle count")->check(CLI::PositiveNumber);
  mc->add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);
  mc->add_option("--seed", seed, "Base seed");
  mc->add_option("--out", out_dir, "Output directory")->required();

  CLI::App* verify = app.add_subcommand("verify", "Run the property suites");
  verify->add_option("--suite", suite, "softmath | jets | controller | invariance | all")
      ->check(CLI::IsMember({"softmath", "jets", "controller", "invariance", "all"}));
  verify->add_option("--seed", seed, "Suite seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : kExitConfig;
  }

  if (run->parsed()) return cmd_run(scenario_path, out_dir, seed, run_seed->count() > 0);
  if (mc->parsed()) return cmd_montecarlo(scenario_path, obstacles, trials, jobs, seed, out_dir);
  return cmd_verify(suite, seed);
}
