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

#ifndef TERRADYN_EVAL_HPP_
#define TERRADYN_EVAL_HPP_

#include <string>
#include <vector>

#include "terradyn/integrator.hpp"
#include "terradyn/optim.hpp"

namespace terradyn {

struct TrackingReport {
  double delta_x = 0;      // mean translation error [m]
  double delta_R_deg = 0;  // mean geodesic rotation error [deg]
  std::vector<double> position_errors;
  std::vector<double> rotation_errors_deg;
  std::size_t n = 0;
};

// Mean Euclidean position error and mean geodesic rotation angle between
// the prediction (sampled at the gt timestamps) and the ground truth.
TrackingReport tracking_errors(const Trajectory& pred, const Trajectory& gt);

// Geodesic angle between two rotations, degrees; the arccos argument is
// clamped against numerical overshoot.
double rotation_angle_deg(const Mat3d& a, const Mat3d& b);

// One row per terrain source: simulate the gt chunk-by-chunk on that
// terrain and aggregate tracking errors over all chunks.
std::vector<std::pair<std::string, TrackingReport>> compare_encoders(
    const Trajectory& gt,
    const std::vector<std::pair<std::string, HeightMap>>& sources,
    const RobotModel& model, const SimConfig& cfg, ContactModelKind kind,
    double chunk_duration = 1.0);

// Total mechanical energy: kinetic + rotational + gravitational potential
// + elastic energy of active contacts.
double mechanical_energy(const RigidState& s, const RobotModel& model,
                         const HeightMap& map, ContactModelKind kind);

}  // namespace terradyn

#endif  // TERRADYN_EVAL_HPP_
