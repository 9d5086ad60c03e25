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

// Trajectory-consistency losses, 1-second chunking, and gradient-based
// terrain recovery from ground-truth trajectories.

#ifndef TERRADYN_OPTIM_HPP_
#define TERRADYN_OPTIM_HPP_

#include <vector>

#include "terradyn/autodiff.hpp"
#include "terradyn/integrator.hpp"
#include "terradyn/terrain.hpp"

namespace terradyn {

struct LossWeights {
  double w_x = 1.0;
  double w_R = 0.0;
};

struct TrajectoryLoss {
  double value = 0;
  std::vector<double> residuals;  // per ground-truth sample
  LossWeights weights;
};

// Sum over gt samples of w_x|x - x_gt|^2 + w_R|R - R_gt|_F^2, with the
// prediction sampled at the gt timestamps.
TrajectoryLoss trajectory_loss(const Trajectory& pred, const Trajectory& gt,
                               const LossWeights& weights = {});

// A re-initialized training/evaluation unit: 1 s of ground truth with the
// waypoint derived from the chunk's end pose.
struct Chunk {
  RigidState initial_state;
  Trajectory gt;  // timestamps relative to chunk start
  WaypointControl waypoint;
  double duration = 1.0;
};

// When a model is given, the chunk waypoints reconstruct the goal the
// recorded controller was driving toward (from the step velocity and the
// controller gain), so re-simulating a chunk on the true terrain
// reproduces the recording; without a model the waypoint falls back to a
// lookahead pose one chunk past the chunk end.
std::vector<Chunk> make_chunks(const Trajectory& gt,
                               double chunk_duration = 1.0,
                               const RobotModel* model = nullptr);

enum class OptimizerKind { kAdam, kGradientDescent };

struct OptimHyper {
  double learning_rate = 0.02;
  int iterations = 200;
  OptimizerKind optimizer = OptimizerKind::kAdam;
  double chunk_duration = 1.0;
  ContactModelKind contact = ContactModelKind::kVertical;
  LossWeights weights;
  bool optimize_h = true;
  bool optimize_e = true;
  bool optimize_d = true;
  // Learning-rate multipliers for the softplus-raw e and d parameters.
  // Heights move by ~lr per Adam step, but stiffness and damping live on
  // scales of 1e2..1e4, so unscaled steps could never cross that range
  // within an optimization budget. 0 means auto: use the mean initial
  // channel value.
  double lr_scale_e = 0.0;
  double lr_scale_d = 0.0;
};

struct OptimReport {
  std::vector<double> loss_curve;  // length iterations + 1
  HeightMap final_map;
  int iterations = 0;
  bool converged = false;
};

// Gradient descent on the terrain channels (e and d through a softplus
// reparameterization so they stay non-negative), accumulating chunk
// gradients per iteration.
OptimReport optimize_terrain(const Trajectory& gt, const HeightMap& initial,
                             const RobotModel& model, const SimConfig& cfg,
                             const OptimHyper& hyper);

// Flat initial terrain covering the gt footprint, at the height of the
// lowest robot point in the first gt state.
HeightMap flat_initial_map(const Trajectory& gt, const RobotModel& model,
                           double resolution = 0.2, double margin = 1.0,
                           double e0 = 1000.0, double d0 = 50.0);

// Binary grid marking cells touched by the bilinear support of any robot
// point at any gt sample.
std::vector<std::uint8_t> traversed_mask(const Trajectory& gt,
                                         const RobotModel& model,
                                         const GridSpec& grid);

// |W (pred - optimized)|^2 + lambda |pred - lidar|^2 over the h channel.
double composite_heightmap_loss(const HeightMap& pred,
                                const HeightMap& optimized,
                                const std::vector<std::uint8_t>& mask,
                                const HeightMap& lidar, double lambda);

namespace detail {
inline double softplus(double x) {
  return x > 30 ? x : std::log1p(std::exp(x));
}
inline double softplus_inv(double y) {
  if (y > 30) return y;
  return std::log(std::expm1(y));
}
inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }
}  // namespace detail

}  // namespace terradyn

#endif  // TERRADYN_OPTIM_HPP_
