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

#include "terradyn/integrator.hpp"

#include <cmath>

namespace terradyn {

Rollout simulate(const RigidState& s0, const HeightMap& map,
                 const WaypointControl& u, const RobotModel& model,
                 const SimConfig& cfg, ContactModelKind kind,
                 bool record_forces, bool gyroscopic) {
  model.validate();
  map.validate();
  cfg.validate();
  ModelParamsT<double> params = make_params(model, gyroscopic);
  auto cells = map_channel_accessor(map);

  const std::size_t nsteps =
      static_cast<std::size_t>(std::floor(cfg.duration / cfg.dt + 1e-9));
  Rollout out;
  out.config = cfg;
  out.steps = nsteps;

  RigidState s = s0;
  auto record = [&](std::size_t step, const RigidState& state) {
    double t = static_cast<double>(step) * cfg.dt;
    out.trajectory.samples.push_back({t, state});
  };
  record(0, s);
  if (record_forces) {
    Deriv d = state_derivative(s, u, params, map, kind);
    out.forces.push_back({d.point_forces, d.contact});
  }

  for (std::size_t step = 0; step < nsteps; ++step) {
    s = detail::euler_step_t<double>(s, u, params, map.grid, cells, kind,
                                     cfg.dt, step);
    if ((step + 1) % static_cast<std::size_t>(cfg.record_stride) == 0) {
      record(step + 1, s);
      if (record_forces) {
        Deriv d = state_derivative(s, u, params, map, kind);
        out.forces.push_back({d.point_forces, d.contact});
      }
    }
  }
  return out;
}

RigidState sample_at(const Trajectory& traj, double t) {
  traj.validate();
  const double t0 = traj.start_time();
  const double t1 = traj.end_time();
  const double tol = 1e-9 * std::max(1.0, std::abs(t1));
  if (t < t0 - tol || t > t1 + tol)
    throw InputError("sample_at: time " + std::to_string(t) +
                     " outside trajectory span [" + std::to_string(t0) + ", " +
                     std::to_string(t1) + "]");
  double tc = std::clamp(t, t0, t1);

  // Bracketing samples via binary search.
  const auto& ss = traj.samples;
  std::size_t hi = 1;
  {
    std::size_t lo = 0, n = ss.size();
    if (n == 1) return ss[0].state;
    std::size_t a = 0, b = n - 1;
    while (b - a > 1) {
      std::size_t mid = (a + b) / 2;
      if (ss[mid].t <= tc)
        a = mid;
      else
        b = mid;
    }
    lo = a;
    hi = b;
    if (tc == ss[lo].t) return ss[lo].state;
    if (tc == ss[hi].t) return ss[hi].state;
  }
  const auto& pa = ss[hi - 1];
  const auto& pb = ss[hi];
  double alpha = (tc - pa.t) / (pb.t - pa.t);

  RigidState out;
  out.x = (1 - alpha) * pa.state.x + alpha * pb.state.x;
  out.v = (1 - alpha) * pa.state.v + alpha * pb.state.v;
  out.omega = (1 - alpha) * pa.state.omega + alpha * pb.state.omega;
  Mat3d rel = pa.state.R.transpose() * pb.state.R;
  out.R = pa.state.R * rot_axis_angle(alpha * rot_log(rel));
  return out;
}

std::vector<RigidState> sample_at(const Rollout& rollout,
                                  const std::vector<double>& times) {
  std::vector<RigidState> out;
  out.reserve(times.size());
  for (double t : times) out.push_back(sample_at(rollout.trajectory, t));
  return out;
}

}  // namespace terradyn
