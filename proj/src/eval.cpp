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

#include "terradyn/eval.hpp"

#include <algorithm>
#include <cmath>

namespace terradyn {

double rotation_angle_deg(const Mat3d& a, const Mat3d& b) {
  Mat3d rel = a.transpose() * b;
  double tr = rel(0, 0) + rel(1, 1) + rel(2, 2);
  double c = std::clamp((tr - 1.0) / 2.0, -1.0, 1.0);
  return std::acos(c) * 180.0 / M_PI;
}

TrackingReport tracking_errors(const Trajectory& pred, const Trajectory& gt) {
  pred.validate();
  gt.validate();
  TrackingReport rep;
  for (const auto& g : gt.samples) {
    RigidState p = sample_at(pred, g.t);
    Vec3d dx = p.x - g.state.x;
    rep.position_errors.push_back(norm(dx));
    rep.rotation_errors_deg.push_back(rotation_angle_deg(p.R, g.state.R));
  }
  rep.n = rep.position_errors.size();
  if (rep.n == 0) throw InputError("tracking_errors: empty ground truth");
  for (double v : rep.position_errors) rep.delta_x += v;
  for (double v : rep.rotation_errors_deg) rep.delta_R_deg += v;
  rep.delta_x /= static_cast<double>(rep.n);
  rep.delta_R_deg /= static_cast<double>(rep.n);
  return rep;
}

std::vector<std::pair<std::string, TrackingReport>> compare_encoders(
    const Trajectory& gt,
    const std::vector<std::pair<std::string, HeightMap>>& sources,
    const RobotModel& model, const SimConfig& cfg, ContactModelKind kind,
    double chunk_duration) {
  std::vector<Chunk> chunks = make_chunks(gt, chunk_duration, &model);
  std::vector<std::pair<std::string, TrackingReport>> out;
  for (const auto& [name, map] : sources) {
    TrackingReport agg;
    SimConfig ccfg = cfg;
    for (const auto& chunk : chunks) {
      ccfg.duration = chunk.duration;
      Rollout r = simulate(chunk.initial_state, map, chunk.waypoint, model,
                           ccfg, kind);
      TrackingReport cr = tracking_errors(r.trajectory, chunk.gt);
      agg.position_errors.insert(agg.position_errors.end(),
                                 cr.position_errors.begin(),
                                 cr.position_errors.end());
      agg.rotation_errors_deg.insert(agg.rotation_errors_deg.end(),
                                     cr.rotation_errors_deg.begin(),
                                     cr.rotation_errors_deg.end());
    }
    agg.n = agg.position_errors.size();
    if (agg.n > 0) {
      for (double v : agg.position_errors) agg.delta_x += v;
      for (double v : agg.rotation_errors_deg) agg.delta_R_deg += v;
      agg.delta_x /= static_cast<double>(agg.n);
      agg.delta_R_deg /= static_cast<double>(agg.n);
    }
    out.emplace_back(name, std::move(agg));
  }
  return out;
}

double mechanical_energy(const RigidState& s, const RobotModel& model,
                         const HeightMap& map, ContactModelKind kind) {
  model.validate();
  map.validate();
  double e_kin = 0.5 * model.total_mass * dot(s.v, s.v);
  double e_rot = 0.5 * dot(s.omega, model.inertia * s.omega);
  double e_pot = 0;
  double e_elastic = 0;
  for (std::size_t i = 0; i < model.points.size(); ++i) {
    auto [pos, vel] = point_world(s, model.points[i]);
    e_pot += model.masses[i] * model.gravity * pos.z;
    TerrainSample ts = sample(map, pos.x, pos.y);
    if (!ts.in_bounds || pos.z > ts.h) continue;
    double pen = kind == ContactModelKind::kVertical ? ts.h - pos.z
                                                     : (ts.h - pos.z) * ts.n.z;
    e_elastic += 0.5 * ts.e * pen * pen;
  }
  return e_kin + e_rot + e_pot + e_elastic;
}

}  // namespace terradyn
