// Copyright 2026 The terradyn Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "terradyn/scenarios.hpp"

#include <cmath>
#include <random>

namespace terradyn {

Mat3d inertia_from_points(const std::vector<Vec3d>& points,
                          const std::vector<double>& masses) {
  Mat3d j{};
  for (std::size_t k = 0; k < points.size(); ++k) {
    const Vec3d& p = points[k];
    double m = masses[k];
    double r2 = dot(p, p);
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b)
        j(a, b) += m * ((a == b ? r2 : 0.0) - p[a] * p[b]);
  }
  return j;
}

RobotModel default_robot() {
  RobotModel model;
  const double hx = 0.3, hy = 0.2, hz = 0.1;
  for (int sx : {-1, 1})
    for (int sy : {-1, 1})
      for (int sz : {-1, 1})
        model.points.push_back({sx * hx, sy * hy, sz * hz});
  model.masses.assign(8, 5.0);
  model.total_mass = 40.0;
  model.inertia = inertia_from_points(model.points, model.masses);
  model.k_v = 1.0;
  model.k_theta = 2.0;
  model.k_phi = 1.0;
  model.v_max = 1.0;
  model.omega_max = 1.5;
  model.gravity = 9.81;
  model.validate();
  return model;
}

RobotModel point_robot(double mass) {
  RobotModel model;
  model.points.push_back({0, 0, 0});
  model.masses.push_back(mass);
  model.total_mass = mass;
  model.inertia = mass * 0.01 * Mat3d::identity();
  model.validate();
  return model;
}

std::vector<std::string> scenario_names() {
  return {"free_fall", "drop_test", "equilibrium", "ramp_drive",
          "bump_terrain"};
}

namespace {

HeightMap flat_map(double half_x, double half_y, double res, double e0,
                   double d0) {
  GridSpec g;
  g.resolution = res;
  g.origin_x = -half_x;
  g.origin_y = -half_y;
  g.nx = static_cast<int>(std::round(2 * half_x / res)) + 1;
  g.ny = static_cast<int>(std::round(2 * half_y / res)) + 1;
  return HeightMap(g, 0.0, e0, d0);
}

}  // namespace

Scenario make_scenario(const std::string& name, unsigned seed) {
  Scenario sc;
  sc.name = name;
  sc.robot = default_robot();
  sc.s0.R = Mat3d::identity();
  sc.cfg.dt = 0.01;

  if (name == "free_fall") {
    sc.map = flat_map(2.0, 2.0, 0.5, 1000.0, 50.0);
    sc.s0.x = {0, 0, 10.0};
    sc.waypoint = {0, 0, 0};
    sc.cfg.dt = 1e-3;
    sc.cfg.duration = 1.0;
    return sc;
  }
  if (name == "drop_test") {
    sc.map = flat_map(2.0, 2.0, 0.5, 5000.0, 200.0);
    sc.s0.x = {0, 0, 0.3};
    sc.waypoint = {0, 0, 0};
    sc.cfg.duration = 5.0;
    return sc;
  }
  if (name == "equilibrium") {
    sc.map = flat_map(2.0, 2.0, 0.5, 5000.0, 200.0);
    // Four bottom points carry the weight: penetration Mg / (4e).
    double pen = sc.robot.total_mass * sc.robot.gravity / (4.0 * 5000.0);
    sc.s0.x = {0, 0, 0.1 - pen};
    sc.waypoint = {0, 0, 0};
    sc.cfg.duration = 5.0;
    return sc;
  }
  if (name == "ramp_drive" || name == "bump_terrain") {
    GridSpec g;
    g.resolution = 0.2;
    g.origin_x = -3.0;
    g.origin_y = -2.0;
    g.nx = 31;
    g.ny = 21;
    sc.map = HeightMap(g, 0.0, 5000.0, 200.0);
    std::mt19937 rng(seed);
    for (int i = 0; i < g.nx; ++i) {
      for (int j = 0; j < g.ny; ++j) {
        double x = g.origin_x + i * g.resolution;
        double y = g.origin_y + j * g.resolution;
        double h;
        if (name == "ramp_drive") {
          h = 0.1 * x;
        } else {
          double r2 = (x - 0.5) * (x - 0.5) + y * y;
          h = 0.12 * std::exp(-r2 / (0.6 * 0.6));
        }
        if (seed != 0) {
          double u = rng() * (1.0 / 4294967296.0);
          h += 0.01 * (2.0 * u - 1.0);
        }
        sc.map.h_at(i, j) = h;
      }
    }
    double x0 = -1.5;
    TerrainSample ts = sample(sc.map, x0, 0.0);
    double pen = sc.robot.total_mass * sc.robot.gravity / (4.0 * 5000.0);
    sc.s0.x = {x0, 0, ts.h + 0.1 - pen};
    sc.waypoint = {1.5, 0, 0};
    sc.cfg.duration = 5.0;
    return sc;
  }
  throw InputError("unknown scenario '" + name +
                   "'; expected one of free_fall, drop_test, equilibrium, "
                   "ramp_drive, bump_terrain");
}

GradCheckProblem random_smooth_problem(unsigned seed) {
  std::mt19937 rng(seed);
  auto urand = [&](double lo, double hi) {
    double u = rng() * (1.0 / 4294967296.0);
    return lo + u * (hi - lo);
  };

  GradCheckProblem p;
  p.model = default_robot();

  // Coarse cells so no robot point crosses a cell edge during the short
  // rollout (bilinear sampling is only C0 across edges, which would spoil
  // finite differences).
  GridSpec g;
  g.resolution = 1.0;
  g.origin_x = -3.0;
  g.origin_y = -3.0;
  g.nx = 7;
  g.ny = 7;
  p.map = HeightMap(g, 0.0, 250.0, 150.0);
  for (int i = 0; i < g.nx; ++i) {
    for (int j = 0; j < g.ny; ++j) {
      p.map.h_at(i, j) = urand(-0.03, 0.03);
      p.map.e_at(i, j) = 250.0 * urand(0.8, 1.2);
      p.map.d_at(i, j) = 150.0 * urand(0.8, 1.2);
    }
  }

  // Start near the fully-submerged equilibrium so every point stays in
  // contact; the strong damping keeps the oscillation overdamped.
  double pen_eq = p.model.total_mass * p.model.gravity / (8.0 * 250.0);
  p.s0.x = {urand(-0.05, 0.05), urand(-0.05, 0.05),
            urand(-0.02, 0.02) - pen_eq};
  p.s0.v = {urand(-0.03, 0.03), urand(-0.03, 0.03), urand(-0.03, 0.03)};
  p.s0.omega = {urand(-0.03, 0.03), urand(-0.03, 0.03), urand(-0.03, 0.03)};
  p.s0.R = rot_z(urand(-0.05, 0.05));

  // Goal mostly straight ahead: keeps both saturation clamps and the
  // angle-wrap branch far away.
  p.u = {p.s0.x.x + urand(0.25, 0.4), p.s0.x.y + urand(-0.05, 0.05),
         urand(-0.1, 0.1)};

  p.cfg.dt = 0.01;
  p.cfg.duration = 0.2;
  p.kind = ContactModelKind::kVertical;
  for (int k = 0; k < 3; ++k)
    p.targets.push_back(
        {urand(-0.5, 0.5), urand(-0.5, 0.5), urand(-0.5, 0.5)});
  return p;
}

}  // namespace terradyn
