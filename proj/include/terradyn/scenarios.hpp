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

// Built-in synthetic scenarios shared by the CLI and the acceptance suite.

#ifndef TERRADYN_SCENARIOS_HPP_
#define TERRADYN_SCENARIOS_HPP_

#include <string>
#include <vector>

#include "terradyn/autodiff.hpp"
#include "terradyn/core.hpp"
#include "terradyn/dynamics.hpp"
#include "terradyn/terrain.hpp"

namespace terradyn {

struct Scenario {
  std::string name;
  RobotModel robot;
  HeightMap map;
  RigidState s0;
  WaypointControl waypoint;
  SimConfig cfg;
  ContactModelKind contact = ContactModelKind::kVertical;
};

// Names: free_fall, drop_test, equilibrium, ramp_drive, bump_terrain.
// Seed adds height noise to the terrain scenarios (0 = noiseless).
Scenario make_scenario(const std::string& name, unsigned seed = 0);
std::vector<std::string> scenario_names();

// Default 8-point box robot used by the scenarios.
RobotModel default_robot();
// Single-point robot for 1-DOF settling analysis.
RobotModel point_robot(double mass);

// Inertia of the mass points about the COM (assumes points are centered).
Mat3d inertia_from_points(const std::vector<Vec3d>& points,
                          const std::vector<double>& masses);

// Randomized rollout instance kept away from contact and clamp boundaries,
// suitable for finite-difference gradient validation.
GradCheckProblem random_smooth_problem(unsigned seed);

}  // namespace terradyn

#endif  // TERRADYN_SCENARIOS_HPP_
