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

// Reverse-mode differentiation of a full rollout: the forward pass records
// the unrolled Euler loop (including re-orthonormalization) on a tape, and
// the backward sweep yields exact gradients of the discrete program with
// respect to terrain cells, robot parameters, initial state and waypoint.

#ifndef TERRADYN_AUTODIFF_HPP_
#define TERRADYN_AUTODIFF_HPP_

#include <array>
#include <map>
#include <string>
#include <vector>

#include "terradyn/integrator.hpp"
#include "terradyn/tape.hpp"

namespace terradyn {

struct CellKey {
  int i = 0;
  int j = 0;
  auto operator<=>(const CellKey&) const = default;
};

// Recorded forward pass of one rollout plus everything backward needs:
// leaf indices of all differentiable inputs and the tape positions of each
// recorded trajectory sample.
struct RolloutTape {
  ad::Tape ops;

  std::array<std::int32_t, 3> x0, v0, omega0, u_leaf;
  std::array<std::int32_t, 9> R0, inertia_leaf;
  std::int32_t total_mass_leaf = -1;
  std::vector<std::int32_t> mass_leaves;
  // Heightmap cells touched by some bilinear support; channel-major leaf
  // indices (h, e, d).
  std::map<CellKey, std::array<std::int32_t, 3>> cell_leaves;
  // Per recorded sample: tape indices of x(3), v(3), R(9), omega(3).
  std::vector<std::array<std::int32_t, 18>> sample_vars;

  Mat3d R0_value;
  BranchDiagnostics diagnostics;

  RolloutTape() : ops(0) {}
  explicit RolloutTape(std::size_t max_nodes) : ops(max_nodes) {}
};

// Sparse gradient of a scalar loss with respect to every differentiable
// rollout input. Cells never touched by a contact footprint do not appear.
struct GradientBundle {
  struct CellGrad {
    double h = 0, e = 0, d = 0;
  };
  std::map<CellKey, CellGrad> cells;

  Vec3d d_x0{}, d_v0{}, d_omega0{};
  Mat3d d_R0{};
  double d_total_mass = 0;
  Mat3d d_inertia{};
  std::vector<double> d_masses;
  double d_waypoint_x = 0, d_waypoint_y = 0, d_waypoint_phi = 0;

  // 12-vector view of the initial-state gradient: x, v, rotation tangent
  // (world-frame axis-angle directions applied as exp(eps*G_k)*R0), omega.
  std::array<double, 12> s0_vector(const Mat3d& r0) const;
};

// Upstream gradient aligned with the recorded trajectory samples.
struct TrajectoryGrad {
  struct SampleGrad {
    Vec3d d_x{}, d_v{}, d_omega{};
    Mat3d d_R{};
  };
  std::vector<SampleGrad> samples;
};

// Forward rollout identical (bit-for-bit) to simulate(), plus the tape.
std::pair<Rollout, RolloutTape> rollout_with_tape(
    const RigidState& s0, const HeightMap& map, const WaypointControl& u,
    const RobotModel& model, const SimConfig& cfg, ContactModelKind kind,
    bool gyroscopic = false);

// Reverse sweep over the tape; branch decisions are held as recorded.
GradientBundle backward(const RolloutTape& tape,
                        const TrajectoryGrad& upstream);

// Finite-difference validation harness.
struct GradCheckEntry {
  std::string name;
  double analytic = 0;
  double numeric = 0;
  double rel_error = 0;
  bool ok = true;
};

struct GradCheckReport {
  std::vector<GradCheckEntry> entries;
  double max_rel_error = 0;
  bool passed = false;
  // True when the instance sits too close to a contact or clamp boundary
  // for finite differences to be meaningful.
  bool boundary_skipped = false;
  BranchDiagnostics diagnostics;
};

struct GradCheckProblem {
  RigidState s0;
  HeightMap map;
  WaypointControl u;
  RobotModel model;
  SimConfig cfg;
  ContactModelKind kind = ContactModelKind::kVertical;
  // Loss: sum over recorded samples of |x_k - target_k|^2. Targets default
  // to the origin when empty.
  std::vector<Vec3d> targets;
};

GradCheckReport grad_check(const GradCheckProblem& problem, double eps = 1e-5,
                           double tolerance = 1e-4,
                           double boundary_margin = 1e-4,
                           double clamp_margin = 1e-6);

// Loss value + upstream gradient for the grad_check objective; exposed so
// tests can reuse the exact same objective.
double position_loss(const Trajectory& traj, const std::vector<Vec3d>& targets,
                     TrajectoryGrad* grad_out = nullptr);

}  // namespace terradyn

#endif  // TERRADYN_AUTODIFF_HPP_
