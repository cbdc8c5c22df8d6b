// Drives the installed binary end to end: exit codes and output files.

#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include "safenav/scenario_io.hpp"

namespace {

namespace fs = std::filesystem;

std::string cli() {
  const char* path = std::getenv("SAFENAV_CLI");
  REQUIRE_MESSAGE(path != nullptr, "SAFENAV_CLI must point at the binary");
  return path;
}

std::string scenario_dir() { return SAFENAV_SCENARIO_DIR; }

int run_command(const std::string& args) {
  const std::string cmd = cli() + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

fs::path fresh_dir(const char* name) {
  const fs::path dir = fs::temp_directory_path() / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("run: safe completion writes artifacts and exits 0") {
  const fs::path out = fresh_dir("cli_run_ok");
  const int code = run_command("run --scenario " + scenario_dir() +
                               "/ground_static.cfg --out " + out.string());
  CHECK(code == 0);
  CHECK(fs::exists(out / "trajectory.csv"));
  CHECK(fs::exists(out / "metrics.json"));
  std::ifstream m(out / "metrics.json");
  std::string text((std::istreambuf_iterator<char>(m)), std::istreambuf_iterator<char>());
  CHECK(text.find("\"reached\": true") != std::string::npos);
  CHECK(text.find("\"collided\": false") != std::string::npos);
}

TEST_CASE("run: missing scenario file exits 1") {
  const fs::path out = fresh_dir("cli_run_missing");
  CHECK(run_command("run --scenario /nonexistent.cfg --out " + out.string()) == 1);
}

TEST_CASE("run: malformed scenario exits 1") {
  const fs::path out = fresh_dir("cli_run_bad");
  const fs::path bad = out / "bad.cfg";
  std::ofstream(bad) << "{ \"model\": \"unicycle\" ";  // truncated document
  CHECK(run_command("run --scenario " + bad.string() + " --out " + out.string()) == 1);
}

TEST_CASE("run: initial state inside an obstacle exits 3") {
  const fs::path out = fresh_dir("cli_run_pre");
  using namespace safenav;
  ScenarioBundle bundle = builtin_scenario("ground_static");
  bundle.config.x0(0) = 6.95;  // just inside the first circle's rim
  bundle.config.x0(1) = 3.4;
  bundle.config.world_ref = (out / "world.json").string();
  std::ofstream(out / "world.json") << world_to_json(bundle.world);
  std::ofstream(out / "scen.cfg") << scenario_to_json(bundle.config);
  CHECK(run_command("run --scenario " + (out / "scen.cfg").string() + " --out " +
                    out.string()) == 3);
}

TEST_CASE("montecarlo: writes the study tables, deterministic across jobs") {
  const fs::path out1 = fresh_dir("cli_mc1");
  const fs::path out2 = fresh_dir("cli_mc2");
  const std::string base = "montecarlo --scenario " + scenario_dir() +
                           "/ground_dynamic.cfg --obstacles 3..4 --trials 4 --seed 5 --out ";
  CHECK(run_command(base + out1.string() + " --jobs 1") == 0);
  CHECK(run_command(base + out2.string() + " --jobs 2") == 0);

  const auto slurp = [](const fs::path& p) {
    std::ifstream in(p);
    return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  };
  CHECK(slurp(out1 / "table2.json") == slurp(out2 / "table2.json"));
  CHECK(slurp(out1 / "boxstats.json") == slurp(out2 / "boxstats.json"));
  CHECK(slurp(out1 / "table2.json").find("\"n_obstacles\": 3") != std::string::npos);
  CHECK(slurp(out1 / "table2.json").find("\"n_obstacles\": 4") != std::string::npos);
}

TEST_CASE("montecarlo: bad obstacle range exits 1") {
  const fs::path out = fresh_dir("cli_mc_bad");
  CHECK(run_command("montecarlo --scenario " + scenario_dir() +
                    "/ground_dynamic.cfg --obstacles 5..x --trials 2 --out " +
                    out.string()) == 1);
}

TEST_CASE("verify: a fast suite passes and is stable under a fixed seed") {
  CHECK(run_command("verify --suite softmath --seed 3") == 0);
  CHECK(run_command("verify --suite softmath --seed 3") == 0);
  CHECK(run_command("verify --suite bogus --seed 3") == 1);  // rejected by the parser
}
