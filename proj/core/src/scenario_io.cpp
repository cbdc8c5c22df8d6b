#include "safenav/scenario_io.hpp"

#include <cinttypes>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

namespace safenav {

using nlohmann::json;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spit(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write file: " + path);
  out << text;
}

Vec vec_from(const json& j) {
  Vec v(j.size());
  for (size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = j[i].get<double>();
  return v;
}

json vec_to(const Vec& v) {
  json j = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) j.push_back(v(i));
  return j;
}

Eigen::Vector2d vec2_from(const json& j) {
  if (j.size() != 2) throw ConfigError("world: expected a 2D point");
  return {j[0].get<double>(), j[1].get<double>()};
}

json vec2_to(const Eigen::Vector2d& v) { return json::array({v.x(), v.y()}); }

}  // namespace

// ---------------------------------------------------------------------------
// World
// ---------------------------------------------------------------------------

World parse_world(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("world: ") + e.what());
  }
  World w;
  try {
    w.dim = j.at("dim").get<int>();
    w.bounds_min = vec_from(j.at("bounds").at("min"));
    w.bounds_max = vec_from(j.at("bounds").at("max"));
    for (const auto& s : j.value("static", json::array())) {
      const std::string type = s.at("type").get<std::string>();
      if (type == "circle") {
        w.circles.push_back({vec2_from(s.at("center")), s.at("radius").get<double>()});
      } else if (type == "polygon") {
        ConvexPolygon poly;
        for (const auto& v : s.at("vertices")) poly.vertices.push_back(vec2_from(v));
        w.polygons.push_back(std::move(poly));
      } else if (type == "chain") {
        SegmentChain ch;
        for (const auto& v : s.at("points")) ch.points.push_back(vec2_from(v));
        w.chains.push_back(std::move(ch));
      } else if (type == "sphere") {
        const Vec c = vec_from(s.at("center"));
        if (c.size() != 3) throw ConfigError("world: sphere center must be 3D");
        w.spheres.push_back({Eigen::Vector3d(c(0), c(1), c(2)), s.at("radius").get<double>()});
      } else if (type == "prism") {
        Prism p;
        for (const auto& v : s.at("footprint")) p.footprint.push_back(vec2_from(v));
        p.z_min = s.at("zmin").get<double>();
        p.z_max = s.at("zmax").get<double>();
        w.prisms.push_back(std::move(p));
      } else {
        throw ConfigError("world: unknown static obstacle type '" + type + "'");
      }
    }
    for (const auto& d : j.value("dynamic", json::array())) {
      DynamicObstacle obs;
      obs.radius = d.at("radius").get<double>();
      obs.speed = d.at("speed").get<double>();
      for (const auto& wp : d.at("waypoints")) obs.waypoints.push_back(vec_from(wp));
      w.dynamic.push_back(std::move(obs));
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("world: ") + e.what());
  }
  w.validate();
  return w;
}

World load_world(const std::string& path) { return parse_world(slurp(path)); }

std::string world_to_json(const World& w) {
  json j;
  j["dim"] = w.dim;
  j["bounds"] = {{"min", vec_to(w.bounds_min)}, {"max", vec_to(w.bounds_max)}};
  json statics = json::array();
  for (const auto& c : w.circles)
    statics.push_back({{"type", "circle"}, {"center", vec2_to(c.center)}, {"radius", c.radius}});
  for (const auto& p : w.polygons) {
    json verts = json::array();
    for (const auto& v : p.vertices) verts.push_back(vec2_to(v));
    statics.push_back({{"type", "polygon"}, {"vertices", verts}});
  }
  for (const auto& ch : w.chains) {
    json pts = json::array();
    for (const auto& v : ch.points) pts.push_back(vec2_to(v));
    statics.push_back({{"type", "chain"}, {"points", pts}});
  }
  for (const auto& s : w.spheres)
    statics.push_back({{"type", "sphere"},
                       {"center", json::array({s.center.x(), s.center.y(), s.center.z()})},
                       {"radius", s.radius}});
  for (const auto& p : w.prisms) {
    json verts = json::array();
    for (const auto& v : p.footprint) verts.push_back(vec2_to(v));
    statics.push_back({{"type", "prism"}, {"footprint", verts}, {"zmin", p.z_min}, {"zmax", p.z_max}});
  }
  j["static"] = statics;
  json dynamics = json::array();
  for (const auto& d : w.dynamic) {
    json wps = json::array();
    for (const auto& wp : d.waypoints) wps.push_back(vec_to(wp));
    dynamics.push_back({{"radius", d.radius}, {"speed", d.speed}, {"waypoints", wps}});
  }
  j["dynamic"] = dynamics;
  return j.dump(2);
}

// ---------------------------------------------------------------------------
// Scenario
// ---------------------------------------------------------------------------

namespace {

ScenarioConfig parse_scenario_config(const json& j) {
  ScenarioConfig cfg;
  cfg.name = j.value("name", "scenario");
  const std::string model = j.at("model").get<std::string>();
  if (model == "unicycle")
    cfg.model = ModelKind::Unicycle;
  else if (model == "double_integrator")
    cfg.model = ModelKind::DoubleIntegrator;
  else if (model == "quadrotor")
    cfg.model = ModelKind::Quadrotor;
  else
    throw ConfigError("scenario: unknown model '" + model + "'");

  cfg.world_ref = j.at("world").get<std::string>();
  cfg.x0 = vec_from(j.at("x0"));
  cfg.goal = vec_from(j.at("goal"));

  const json& lj = j.at("lidar");
  cfg.lidar.max_range = lj.at("max_range").get<double>();
  cfg.lidar.beams = lj.at("beams").get<int>();
  cfg.lidar.fov = lj.value("fov_deg", 360.0) * M_PI / 180.0;
  cfg.lidar.period = lj.at("period").get<double>();
  cfg.lidar.azimuth_count = lj.value("azimuth_count", 30);
  cfg.lidar.elevation_count = lj.value("elevation_count", 10);

  const json& cj = j.at("composer");
  cfg.window_n = cj.at("window").get<int>();
  cfg.kappa = cj.at("kappa").get<double>();
  const std::string variant = cj.value("variant", "inner_blend");
  if (variant == "inner_blend")
    cfg.variant = CompositionVariant::InnerBlend;
  else if (variant == "outer_blend")
    cfg.variant = CompositionVariant::OuterBlend;
  else
    throw ConfigError("scenario: unknown variant '" + variant + "'");
  const json& ej = cj.at("eta");
  const std::string kind = ej.value("kind", "polynomial");
  if (kind == "polynomial")
    cfg.eta.kind = SmoothstepSpec::Kind::Polynomial;
  else if (kind == "sinusoidal")
    cfg.eta.kind = SmoothstepSpec::Kind::Sinusoidal;
  else
    throw ConfigError("scenario: unknown eta kind '" + kind + "'");
  cfg.eta.r = ej.value("r", 2);
  cfg.eta.nu = ej.value("nu", 2.0);

  const json& fj = j.at("filter");
  cfg.gamma = fj.at("gamma").get<double>();
  cfg.alpha_gain = fj.at("alpha").get<double>();
  cfg.alpha0_gain = fj.at("alpha0").get<double>();

  const json& bj = j.at("barrier");
  cfg.rho = bj.at("rho").get<double>();
  cfg.eps_a = bj.at("eps_a").get<double>();
  cfg.eps_beta = bj.at("eps_beta").get<double>();
  if (bj.contains("vbar")) cfg.vbar = bj.at("vbar").get<double>();
  cfg.fov_interior_margin = bj.value("fov_interior_margin", 0.02);

  const json gj = j.value("goal_gains", json::object());
  cfg.k1 = gj.value("k1", 0.5);
  cfg.k2 = gj.value("k2", 3.0);
  cfg.k3 = gj.value("k3", 3.0);
  cfg.k5 = gj.value("k5", 3.0);
  cfg.k6 = gj.value("k6", 2.0);
  cfg.goal_radius = gj.value("goal_radius", 0.05);
  cfg.goal_tolerance = gj.value("goal_tolerance", 0.1);

  const json rj = j.value("rates", json::object());
  cfg.control_hz = rj.value("control_hz", 100.0);
  cfg.integrator_dt = rj.value("integrator_dt", 1e-3);

  cfg.duration = j.value("duration", 20.0);
  cfg.seed = j.value("seed", std::uint64_t{0});
  return cfg;
}

}  // namespace

std::string scenario_to_json(const ScenarioConfig& cfg) {
  json j;
  j["name"] = cfg.name;
  j["model"] = cfg.model == ModelKind::Unicycle ? "unicycle"
               : cfg.model == ModelKind::DoubleIntegrator ? "double_integrator"
                                                          : "quadrotor";
  j["world"] = cfg.world_ref;
  j["x0"] = vec_to(cfg.x0);
  j["goal"] = vec_to(cfg.goal);
  j["lidar"] = {{"max_range", cfg.lidar.max_range},
                {"beams", cfg.lidar.beams},
                {"fov_deg", cfg.lidar.fov * 180.0 / M_PI},
                {"period", cfg.lidar.period},
                {"azimuth_count", cfg.lidar.azimuth_count},
                {"elevation_count", cfg.lidar.elevation_count}};
  j["composer"] = {
      {"window", cfg.window_n},
      {"kappa", cfg.kappa},
      {"variant", cfg.variant == CompositionVariant::InnerBlend ? "inner_blend" : "outer_blend"},
      {"eta",
       {{"kind", cfg.eta.kind == SmoothstepSpec::Kind::Polynomial ? "polynomial" : "sinusoidal"},
        {"r", cfg.eta.r},
        {"nu", cfg.eta.nu}}}};
  j["filter"] = {{"gamma", cfg.gamma}, {"alpha", cfg.alpha_gain}, {"alpha0", cfg.alpha0_gain}};
  json bj = {{"rho", cfg.rho},
             {"eps_a", cfg.eps_a},
             {"eps_beta", cfg.eps_beta},
             {"fov_interior_margin", cfg.fov_interior_margin}};
  if (cfg.vbar) bj["vbar"] = *cfg.vbar;
  j["barrier"] = bj;
  j["goal_gains"] = {{"k1", cfg.k1}, {"k2", cfg.k2}, {"k3", cfg.k3},
                     {"k5", cfg.k5}, {"k6", cfg.k6},
                     {"goal_radius", cfg.goal_radius},
                     {"goal_tolerance", cfg.goal_tolerance}};
  j["rates"] = {{"control_hz", cfg.control_hz}, {"integrator_dt", cfg.integrator_dt}};
  j["duration"] = cfg.duration;
  j["seed"] = cfg.seed;
  return j.dump(2);
}

ScenarioBundle parse_scenario(const std::string& json_text, const std::string& base_dir) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("scenario: ") + e.what());
  }
  ScenarioBundle bundle;
  try {
    bundle.config = parse_scenario_config(j);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("scenario: ") + e.what());
  }
  const std::filesystem::path world_path =
      std::filesystem::path(base_dir) / bundle.config.world_ref;
  bundle.world = load_world(world_path.string());
  bundle.config.validate();
  return bundle;
}

ScenarioBundle load_scenario(const std::string& path) {
  const std::filesystem::path p(path);
  return parse_scenario(slurp(path), p.parent_path().string());
}

// ---------------------------------------------------------------------------
// Builtin scenarios (compiled-in copies of the shipped files)
// ---------------------------------------------------------------------------

namespace builtin {

extern const char* const kGroundWorld;
extern const char* const kGroundDynamicWorld;
extern const char* const kQuadrotorWorld;
extern const char* const kGroundStatic;
extern const char* const kGroundDynamic;
extern const char* const kGroundFov120;
extern const char* const kQuadrotorStatic;

const std::map<std::string, const char*>& world_table() {
  static const std::map<std::string, const char*> table = {
      {"worlds/ground.json", kGroundWorld},
      {"worlds/ground_dynamic.json", kGroundDynamicWorld},
      {"worlds/quadrotor.json", kQuadrotorWorld},
  };
  return table;
}

const std::map<std::string, const char*>& scenario_table() {
  static const std::map<std::string, const char*> table = {
      {"ground_static", kGroundStatic},
      {"ground_dynamic", kGroundDynamic},
      {"ground_fov120", kGroundFov120},
      {"quadrotor_static", kQuadrotorStatic},
  };
  return table;
}

}  // namespace builtin

std::vector<std::string> builtin_scenario_names() {
  std::vector<std::string> names;
  for (const auto& [name, text] : builtin::scenario_table()) names.push_back(name);
  return names;
}

ScenarioBundle builtin_scenario(const std::string& name) {
  const auto& table = builtin::scenario_table();
  const auto it = table.find(name);
  if (it == table.end()) throw ConfigError("unknown builtin scenario '" + name + "'");
  json j = json::parse(it->second);
  ScenarioBundle bundle;
  bundle.config = parse_scenario_config(j);
  const auto& worlds = builtin::world_table();
  const auto wit = worlds.find(bundle.config.world_ref);
  if (wit == worlds.end())
    throw ConfigError("builtin scenario references unknown world '" + bundle.config.world_ref + "'");
  bundle.world = parse_world(wit->second);
  bundle.config.validate();
  return bundle;
}

// ---------------------------------------------------------------------------
// Run artifacts
// ---------------------------------------------------------------------------

namespace {

void append_double(std::string& out, double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  out += buf;
}

}  // namespace

void write_trajectory_csv(const std::string& path, const TrajectoryLog& log) {
  if (log.rows.empty()) throw std::invalid_argument("write_trajectory_csv: empty log");
  const Eigen::Index n = log.rows.front().state.size();
  const Eigen::Index m = log.rows.front().u.size();

  std::string out;
  out.reserve(log.rows.size() * 200);
  out += "t";
  for (Eigen::Index i = 0; i < n; ++i) out += ",state" + std::to_string(i);
  for (Eigen::Index i = 0; i < m; ++i) out += ",ud" + std::to_string(i);
  for (Eigen::Index i = 0; i < m; ++i) out += ",u" + std::to_string(i);
  out += ",psi0,psi1,lambda,mu,omega,d,clearance,k\n";

  for (const auto& row : log.rows) {
    append_double(out, row.t);
    for (Eigen::Index i = 0; i < n; ++i) { out += ','; append_double(out, row.state(i)); }
    for (Eigen::Index i = 0; i < m; ++i) { out += ','; append_double(out, row.u_d(i)); }
    for (Eigen::Index i = 0; i < m; ++i) { out += ','; append_double(out, row.u(i)); }
    for (double v : {row.psi0, row.psi1, row.lambda, row.mu_star, row.omega, row.d, row.clearance}) {
      out += ',';
      append_double(out, v);
    }
    out += ',' + std::to_string(row.k) + '\n';
  }
  spit(path, out);
}

std::vector<LogRow> read_trajectory_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open file: " + path);
  std::string header;
  if (!std::getline(in, header)) throw ConfigError("trajectory csv: empty file");

  // count state/input widths from the header
  int n = 0, m = 0;
  {
    std::stringstream hs(header);
    std::string col;
    while (std::getline(hs, col, ',')) {
      if (col.rfind("state", 0) == 0) ++n;
      if (col.rfind("ud", 0) == 0) ++m;
    }
  }
  if (n == 0 || m == 0) throw ConfigError("trajectory csv: unrecognized header");

  std::vector<LogRow> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ls(line);
    std::string cell;
    std::vector<double> vals;
    while (std::getline(ls, cell, ',')) vals.push_back(std::strtod(cell.c_str(), nullptr));
    const size_t expect = 1 + static_cast<size_t>(n) + 2 * static_cast<size_t>(m) + 8;
    if (vals.size() != expect) throw ConfigError("trajectory csv: malformed row");
    LogRow row;
    size_t idx = 0;
    row.t = vals[idx++];
    row.state.resize(n);
    for (int i = 0; i < n; ++i) row.state(i) = vals[idx++];
    row.u_d.resize(m);
    for (int i = 0; i < m; ++i) row.u_d(i) = vals[idx++];
    row.u.resize(m);
    for (int i = 0; i < m; ++i) row.u(i) = vals[idx++];
    row.psi0 = vals[idx++];
    row.psi1 = vals[idx++];
    row.lambda = vals[idx++];
    row.mu_star = vals[idx++];
    row.omega = vals[idx++];
    row.d = vals[idx++];
    row.clearance = vals[idx++];
    row.k = static_cast<int>(vals[idx++]);
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_scans_csv(const std::string& path, const std::vector<Scan>& scans) {
  std::string out;
  const bool spherical = !scans.empty() && scans.front().dim == 3;
  out += spherical ? "k,r,theta,phi\n" : "k,r,theta\n";
  for (const Scan& scan : scans) {
    for (const ScanPoint& pt : scan.points) {
      out += std::to_string(scan.index_k);
      out += ',';
      append_double(out, pt.range);
      out += ',';
      append_double(out, pt.azimuth);
      if (spherical) {
        out += ',';
        append_double(out, pt.elevation);
      }
      out += '\n';
    }
  }
  spit(path, out);
}

std::vector<Scan> read_scans_csv(const std::string& path, int dim) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open file: " + path);
  std::string line;
  std::getline(in, line);  // header
  std::vector<Scan> scans;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ls(line);
    std::string cell;
    std::vector<double> vals;
    while (std::getline(ls, cell, ',')) vals.push_back(std::strtod(cell.c_str(), nullptr));
    if (vals.size() < 3) throw ConfigError("scan csv: malformed row");
    const int k = static_cast<int>(vals[0]);
    if (scans.empty() || scans.back().index_k != k) {
      Scan s;
      s.index_k = k;
      s.dim = dim;
      s.pose = Vec::Zero(dim);
      scans.push_back(std::move(s));
    }
    ScanPoint pt;
    pt.range = vals[1];
    pt.azimuth = vals[2];
    if (vals.size() > 3) pt.elevation = vals[3];
    scans.back().points.push_back(pt);
  }
  return scans;
}

std::string metrics_to_json(const Metrics& m) {
  json j;
  if (std::isfinite(m.settling_time_s))
    j["settling_time_s"] = m.settling_time_s;
  else
    j["settling_time_s"] = nullptr;
  j["rms_u"] = vec_to(m.rms_u);
  j["min_psi0"] = m.min_psi0;
  j["collided"] = m.collided;
  j["reached"] = m.reached;
  return j.dump(2);
}

void write_metrics_json(const std::string& path, const Metrics& metrics) {
  spit(path, metrics_to_json(metrics));
}

namespace {

json box_to_json(const BoxStats& b) {
  return {{"median", b.median}, {"p25", b.p25}, {"p75", b.p75},
          {"p10", b.p10},       {"p90", b.p90}, {"count", b.count}};
}

}  // namespace

void write_montecarlo_outputs(const std::string& out_dir,
                              const std::vector<MonteCarloRow>& rows) {
  json table = json::array();
  json boxes = json::array();
  for (const auto& row : rows) {
    table.push_back({{"n_obstacles", row.n_obstacles},
                     {"percent_safe", row.percent_safe},
                     {"percent_successful", row.percent_successful}});
    boxes.push_back({{"n_obstacles", row.n_obstacles},
                     {"min_psi0", box_to_json(row.min_psi0)},
                     {"settling_time_s", box_to_json(row.settling)},
                     {"rms_u0", box_to_json(row.rms_u0)},
                     {"rms_u1", box_to_json(row.rms_u1)},
                     {"failures",
                      {{"collided", row.collided},
                       {"timed_out", row.timed_out},
                       {"assumption_warned", row.assumption_warned}}}});
  }
  const std::filesystem::path dir(out_dir);
  spit((dir / "table2.json").string(), table.dump(2));
  spit((dir / "boxstats.json").string(), boxes.dump(2));
}

}  // namespace safenav
