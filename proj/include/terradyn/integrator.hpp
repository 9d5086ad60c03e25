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

#ifndef TERRADYN_INTEGRATOR_HPP_
#define TERRADYN_INTEGRATOR_HPP_

#include <optional>
#include <string>
#include <vector>

#include "terradyn/core.hpp"
#include "terradyn/dynamics.hpp"

namespace terradyn {

struct Rollout {
  Trajectory trajectory;
  // Per recorded sample when requested; aligned with trajectory.samples.
  std::vector<ForceSet> forces;
  std::size_t steps = 0;
  SimConfig config;
};

namespace detail {

template <class T>
void check_finite(const DerivT<T>& d, std::size_t step) {
  auto bad = [](double x) { return !std::isfinite(x); };
  const char* what = nullptr;
  if (bad(value_of(d.dx.x)) || bad(value_of(d.dx.y)) || bad(value_of(d.dx.z)))
    what = "dx/dt";
  else if (bad(value_of(d.dv.x)) || bad(value_of(d.dv.y)) ||
           bad(value_of(d.dv.z)))
    what = "dv/dt";
  else if (bad(value_of(d.domega.x)) || bad(value_of(d.domega.y)) ||
           bad(value_of(d.domega.z)))
    what = "domega/dt";
  else {
    for (const auto& m : d.dR.m)
      if (bad(value_of(m))) {
        what = "dR/dt";
        break;
      }
  }
  if (what)
    throw NumericalError("euler_step: non-finite " + std::string(what) +
                         " at step " + std::to_string(step));
}

// One explicit Euler step followed by projection back onto SO(3).
template <class T, class Cells>
StateT<T> euler_step_t(const StateT<T>& s, const WaypointT<T>& u,
                       const ModelParamsT<T>& model, const GridSpec& grid,
                       Cells&& cells, ContactModelKind kind, double dt,
                       std::size_t step_index = 0,
                       BranchDiagnostics* diag = nullptr,
                       DerivT<T>* deriv_out = nullptr) {
  DerivT<T> d = state_derivative_t<T>(s, u, model, grid, cells, kind, diag);
  check_finite(d, step_index);
  StateT<T> next;
  next.x = s.x + dt * d.dx;
  next.v = s.v + dt * d.dv;
  next.R = orthonormalize(s.R + dt * d.dR);
  next.omega = s.omega + dt * d.domega;
  if (deriv_out) *deriv_out = std::move(d);
  return next;
}

}  // namespace detail

inline RigidState euler_step(const RigidState& s, const WaypointControl& u,
                             const ModelParamsT<double>& model,
                             const HeightMap& map, ContactModelKind kind,
                             double dt) {
  if (!(dt > 0)) throw InputError("euler_step: dt must be > 0");
  return detail::euler_step_t<double>(s, u, model, map.grid, map_channel_accessor(map),
                                      kind, dt);
}

// Fixed-step explicit Euler rollout. Deterministic: identical inputs give
// bit-identical trajectories.
Rollout simulate(const RigidState& s0, const HeightMap& map,
                 const WaypointControl& u, const RobotModel& model,
                 const SimConfig& cfg, ContactModelKind kind,
                 bool record_forces = false, bool gyroscopic = false);

// State at an arbitrary time inside the rollout: linear interpolation for
// x, v, omega; geodesic interpolation on SO(3) for the rotation.
RigidState sample_at(const Trajectory& traj, double t);
std::vector<RigidState> sample_at(const Rollout& rollout,
                                  const std::vector<double>& times);

}  // namespace terradyn

#endif  // TERRADYN_INTEGRATOR_HPP_
