// Compiled-in copies of the shipped scenario and world files (scenarios/).
// A unit test keeps both in sync.

namespace safenav::builtin {

extern const char* const kGroundWorld = R"json({
  "dim": 2,
  "bounds": {"min": [0, 0], "max": [16, 16]},
  "static": [
    {"type": "chain", "points": [[0.5, 0.5], [15.5, 0.5], [15.5, 15.5], [0.5, 15.5], [0.5, 0.5]]},
    {"type": "circle", "center": [6.3, 3.4], "radius": 0.7},
    {"type": "circle", "center": [12.0, 7.0], "radius": 0.8},
    {"type": "circle", "center": [6.5, 8.5], "radius": 1.0},
    {"type": "polygon", "vertices": [[2.5, 10.0], [4.5, 10.0], [4.5, 12.0], [2.5, 12.0]]}
  ],
  "dynamic": []
})json";

extern const char* const kGroundDynamicWorld = R"json({
  "dim": 2,
  "bounds": {"min": [0, 0], "max": [16, 16]},
  "static": [
    {"type": "chain", "points": [[0.5, 0.5], [15.5, 0.5], [15.5, 15.5], [0.5, 15.5], [0.5, 0.5]]}
  ],
  "dynamic": [
    {"radius": 0.5, "speed": 0.4, "waypoints": [[10.0, 4.0], [6.0, 8.0]]},
    {"radius": 0.5, "speed": 0.5, "waypoints": [[12.0, 12.0], [8.0, 8.0], [12.0, 4.0]]},
    {"radius": 0.5, "speed": 0.3, "waypoints": [[4.0, 10.0], [10.0, 10.0]]},
    {"radius": 0.5, "speed": 0.45, "waypoints": [[14.0, 8.0], [10.0, 8.0], [10.0, 12.0]]}
  ]
})json";

extern const char* const kQuadrotorWorld = R"json({
  "dim": 3,
  "bounds": {"min": [-15, -15, 0], "max": [15, 15, 12]},
  "static": [
    {"type": "prism", "footprint": [[3.0, -4.0], [5.0, -4.0], [5.0, -2.0], [3.0, -2.0]], "zmin": 0.0, "zmax": 12.0},
    {"type": "prism", "footprint": [[2.5, 0.5], [4.5, 0.5], [4.5, 2.5], [2.5, 2.5]], "zmin": 0.0, "zmax": 12.0},
    {"type": "sphere", "center": [6.0, -6.0, 5.0], "radius": 1.0}
  ],
  "dynamic": []
})json";

extern const char* const kGroundStatic = R"json({
  "name": "ground_static",
  "model": "unicycle",
  "world": "worlds/ground.json",
  "x0": [5.0, 2.0, 0.0, 0.0],
  "goal": [13.0, 5.0],
  "lidar": {"max_range": 5.0, "beams": 100, "fov_deg": 360.0, "period": 0.2},
  "composer": {"window": 4, "kappa": 30.0, "variant": "inner_blend",
               "eta": {"kind": "polynomial", "r": 2, "nu": 2.0}},
  "filter": {"gamma": 200.0, "alpha": 50.0, "alpha0": 35.0},
  "barrier": {"rho": 30.0, "eps_a": 0.15, "eps_beta": 0.15},
  "goal_gains": {"k1": 0.5, "k2": 3.0, "k3": 3.0},
  "rates": {"control_hz": 100.0, "integrator_dt": 0.001},
  "duration": 20.0,
  "seed": 1
})json";

extern const char* const kGroundDynamic = R"json({
  "name": "ground_dynamic",
  "model": "unicycle",
  "world": "worlds/ground_dynamic.json",
  "x0": [5.0, 2.0, 0.0, 0.0],
  "goal": [13.0, 13.0],
  "lidar": {"max_range": 5.0, "beams": 100, "fov_deg": 360.0, "period": 0.2},
  "composer": {"window": 1, "kappa": 30.0, "variant": "inner_blend",
               "eta": {"kind": "polynomial", "r": 2, "nu": 2.0}},
  "filter": {"gamma": 200.0, "alpha": 30.0, "alpha0": 30.0},
  "barrier": {"rho": 20.0, "eps_a": 0.2, "eps_beta": 0.2, "vbar": 0.5},
  "goal_gains": {"k1": 0.5, "k2": 3.0, "k3": 3.0},
  "rates": {"control_hz": 100.0, "integrator_dt": 0.001},
  "duration": 20.0,
  "seed": 1
})json";

extern const char* const kGroundFov120 = R"json({
  "name": "ground_fov120",
  "model": "unicycle",
  "world": "worlds/ground.json",
  "x0": [5.0, 2.0, 0.0, 0.0],
  "goal": [11.0, 2.0],
  "lidar": {"max_range": 5.0, "beams": 30, "fov_deg": 120.0, "period": 0.2},
  "composer": {"window": 4, "kappa": 30.0, "variant": "inner_blend",
               "eta": {"kind": "polynomial", "r": 2, "nu": 2.0}},
  "filter": {"gamma": 200.0, "alpha": 65.0, "alpha0": 40.0},
  "barrier": {"rho": 30.0, "eps_a": 0.15, "eps_beta": 0.15},
  "goal_gains": {"k1": 0.5, "k2": 3.0, "k3": 3.0},
  "rates": {"control_hz": 100.0, "integrator_dt": 0.001},
  "duration": 20.0,
  "seed": 1
})json";

extern const char* const kQuadrotorStatic = R"json({
  "name": "quadrotor_static",
  "model": "quadrotor",
  "world": "worlds/quadrotor.json",
  "x0": [8.0, -10.0, 5.0, 0.0, 0.0, 0.0],
  "goal": [0.0, 4.0, 5.0],
  "lidar": {"max_range": 5.0, "beams": 300, "fov_deg": 360.0, "period": 0.2,
            "azimuth_count": 30, "elevation_count": 10},
  "composer": {"window": 2, "kappa": 30.0, "variant": "inner_blend",
               "eta": {"kind": "polynomial", "r": 2, "nu": 2.0}},
  "filter": {"gamma": 200.0, "alpha": 2.5, "alpha0": 40.0},
  "barrier": {"rho": 30.0, "eps_a": 0.15, "eps_beta": 0.15},
  "goal_gains": {"k5": 3.0, "k6": 2.0},
  "rates": {"control_hz": 100.0, "integrator_dt": 0.0002},
  "duration": 20.0,
  "seed": 1
})json";

}  // namespace safenav::builtin
