#pragma once

#include <string>
#include <vector>

#include "safenav/sim.hpp"

namespace safenav {

// World and scenario descriptions are JSON documents; see the files under
// scenarios/ for the schema.

World parse_world(const std::string& json_text);
World load_world(const std::string& path);
std::string world_to_json(const World& world);

/// Parses a scenario. The "world" key is resolved against the scenario
/// file's directory (load_scenario) and also accepts a builtin name.
struct ScenarioBundle {
  ScenarioConfig config;
  World world;
};
ScenarioBundle load_scenario(const std::string& path);
ScenarioBundle parse_scenario(const std::string& json_text, const std::string& base_dir);
std::string scenario_to_json(const ScenarioConfig& cfg);

/// Compiled-in copies of the shipped scenarios, usable without any files on
/// disk: ground_static, ground_dynamic, ground_fov120, quadrotor_static.
std::vector<std::string> builtin_scenario_names();
ScenarioBundle builtin_scenario(const std::string& name);

// ---------------------------------------------------------------------------
// Run artifacts
// ---------------------------------------------------------------------------

/// Header: t,state...,ud...,u...,psi0,psi1,lambda,mu,omega,d,clearance,k.
/// Doubles are printed with enough digits to round-trip exactly.
void write_trajectory_csv(const std::string& path, const TrajectoryLog& log);
std::vector<LogRow> read_trajectory_csv(const std::string& path);

/// One record per beam: k,r,theta[,phi].
void write_scans_csv(const std::string& path, const std::vector<Scan>& scans);
std::vector<Scan> read_scans_csv(const std::string& path, int dim);

void write_metrics_json(const std::string& path, const Metrics& metrics);
std::string metrics_to_json(const Metrics& metrics);

void write_montecarlo_outputs(const std::string& out_dir,
                              const std::vector<MonteCarloRow>& rows);

}  // namespace safenav
