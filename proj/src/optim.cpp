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

#include "terradyn/optim.hpp"

#include <algorithm>
#include <cmath>

#include "terradyn/dynamics.hpp"

namespace terradyn {

namespace {

struct Bracket {
  std::size_t lo = 0;
  std::size_t hi = 0;
  double alpha = 0;
};

Bracket locate(const Trajectory& traj, double t) {
  const auto& ss = traj.samples;
  const double tol = 1e-9 * std::max(1.0, std::abs(traj.end_time()));
  if (t < traj.start_time() - tol || t > traj.end_time() + tol)
    throw InputError("trajectory_loss: timestamp " + std::to_string(t) +
                     " outside prediction span");
  double tc = std::clamp(t, traj.start_time(), traj.end_time());
  Bracket b;
  if (ss.size() == 1) return b;
  std::size_t a = 0, c = ss.size() - 1;
  while (c - a > 1) {
    std::size_t mid = (a + c) / 2;
    if (ss[mid].t <= tc)
      a = mid;
    else
      c = mid;
  }
  b.lo = a;
  b.hi = c;
  b.alpha = (tc - ss[a].t) / (ss[c].t - ss[a].t);
  return b;
}

double frobenius_sq(const Mat3d& a) {
  double s = 0;
  for (double v : a.m) s += v * v;
  return s;
}

// Shared by trajectory_loss (value only) and the optimizer (value plus
// gradient with respect to the recorded prediction samples).
double loss_and_grad(const Trajectory& pred, const Trajectory& gt,
                     const LossWeights& w, std::vector<double>* residuals,
                     TrajectoryGrad* grad) {
  pred.validate();
  gt.validate();
  if (grad) grad->samples.assign(pred.samples.size(), {});
  if (residuals) residuals->clear();

  double total = 0;
  for (const auto& g : gt.samples) {
    Bracket b = locate(pred, g.t);
    const RigidState& sa = pred.samples[b.lo].state;
    const RigidState& sb = pred.samples[b.hi].state;
    Vec3d x = (1 - b.alpha) * sa.x + b.alpha * sb.x;
    Vec3d r = x - g.state.x;
    double term = w.w_x * dot(r, r);

    if (w.w_R != 0.0) {
      RigidState interp = sample_at(pred, g.t);
      Mat3d dr = interp.R - g.state.R;
      term += w.w_R * frobenius_sq(dr);
      if (grad) {
        // Rotation gradient goes to the nearer recorded sample; exact
        // whenever gt timestamps align with recorded ones.
        std::size_t near = b.alpha < 0.5 ? b.lo : b.hi;
        const Mat3d& rn = pred.samples[near].state.R;
        Mat3d drn = rn - g.state.R;
        for (int k = 0; k < 9; ++k)
          grad->samples[near].d_R.m[k] += 2.0 * w.w_R * drn.m[k];
      }
    }
    if (grad) {
      grad->samples[b.lo].d_x += (2.0 * w.w_x * (1 - b.alpha)) * r;
      grad->samples[b.hi].d_x += (2.0 * w.w_x * b.alpha) * r;
    }
    if (residuals) residuals->push_back(term);
    total += term;
  }
  return total;
}

}  // namespace

TrajectoryLoss trajectory_loss(const Trajectory& pred, const Trajectory& gt,
                               const LossWeights& weights) {
  TrajectoryLoss out;
  out.weights = weights;
  out.value = loss_and_grad(pred, gt, weights, &out.residuals, nullptr);
  return out;
}

std::vector<Chunk> make_chunks(const Trajectory& gt, double chunk_duration,
                               const RobotModel* model) {
  gt.validate();
  if (!(chunk_duration > 0))
    throw InputError("make_chunks: chunk duration must be > 0");
  const double tol = 1e-9 * std::max(1.0, std::abs(gt.end_time()));
  if (gt.span() + tol < chunk_duration)
    throw InputError("make_chunks: trajectory shorter than one chunk");

  std::vector<Chunk> out;
  const double t0 = gt.start_time();
  for (int k = 0;; ++k) {
    double tc = t0 + k * chunk_duration;
    double te = tc + chunk_duration;
    if (te > gt.end_time() + tol) break;

    Chunk chunk;
    chunk.duration = chunk_duration;
    chunk.initial_state = sample_at(gt, tc);
    // Waypoint one chunk beyond the chunk end ("carrot" target): aiming at
    // the end pose itself would make the controller decelerate inside the
    // chunk even when the recorded run kept driving, leaving a large
    // terrain-independent loss floor. Past the recorded span, extrapolate
    // with the final velocity.
    double tw = te + chunk_duration;
    RigidState goal;
    if (tw <= gt.end_time()) {
      goal = sample_at(gt, tw);
    } else {
      goal = gt.samples.back().state;
      double extra = tw - gt.end_time();
      goal.x += extra * goal.v;
    }
    if (model != nullptr && gt.samples.size() >= 2 && model->k_v > 0) {
      // Reconstruct the goal the recorded controller was driving toward.
      // The commanded planar speed is min(k_v * dist_to_goal, v_max), so an
      // unsaturated step velocity u gives dist = |u| / k_v along the step
      // direction; a saturated step only bounds the distance from below, so
      // place the carrot comfortably past the saturation radius.
      std::size_t j = gt.samples.size() - 1;
      for (std::size_t k = 1; k < gt.samples.size(); ++k) {
        if (gt.samples[k].t <= tw + tol) {
          j = k;
        } else {
          break;
        }
      }
      const TrajectorySample& a = gt.samples[j - 1];
      const TrajectorySample& b = gt.samples[j];
      double step_dt = b.t - a.t;
      Vec3d u = (1.0 / step_dt) * (b.state.x - a.state.x);
      u.z = 0;
      double speed = std::sqrt(dot(u, u));
      if (speed > 1e-12) {
        double dist = speed >= model->v_max * (1.0 - 1e-6)
                          ? 2.0 * model->v_max / model->k_v
                          : speed / model->k_v;
        goal.x = a.state.x + (dist / speed) * u;
      } else {
        goal.x = a.state.x;
      }
    }
    chunk.waypoint = {goal.x.x, goal.x.y, wrap_angle(heading_of(goal))};
    for (const auto& s : gt.samples) {
      if (s.t >= tc - tol && s.t <= te + tol) {
        double rel = s.t - tc;
        if (!chunk.gt.samples.empty() && rel <= chunk.gt.samples.back().t)
          continue;
        chunk.gt.samples.push_back({rel, s.state});
      }
    }
    if (chunk.gt.samples.empty())
      chunk.gt.samples.push_back({0.0, chunk.initial_state});
    out.push_back(std::move(chunk));
  }
  return out;
}

HeightMap flat_initial_map(const Trajectory& gt, const RobotModel& model,
                           double resolution, double margin, double e0,
                           double d0) {
  gt.validate();
  model.validate();
  double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
  for (const auto& s : gt.samples) {
    for (const auto& p : model.points) {
      auto [pos, vel] = point_world(s.state, p);
      xmin = std::min(xmin, pos.x);
      xmax = std::max(xmax, pos.x);
      ymin = std::min(ymin, pos.y);
      ymax = std::max(ymax, pos.y);
    }
  }
  double z0 = 1e300;
  for (const auto& p : model.points) {
    auto [pos, vel] = point_world(gt.samples.front().state, p);
    z0 = std::min(z0, pos.z);
  }
  GridSpec grid;
  grid.resolution = resolution;
  grid.origin_x = xmin - margin;
  grid.origin_y = ymin - margin;
  grid.nx = std::max(2, static_cast<int>(std::ceil((xmax - xmin + 2 * margin) /
                                                   resolution)) + 1);
  grid.ny = std::max(2, static_cast<int>(std::ceil((ymax - ymin + 2 * margin) /
                                                   resolution)) + 1);
  return HeightMap(grid, z0, e0, d0);
}

std::vector<std::uint8_t> traversed_mask(const Trajectory& gt,
                                         const RobotModel& model,
                                         const GridSpec& grid) {
  gt.validate();
  model.validate();
  grid.validate();
  std::vector<std::uint8_t> mask(static_cast<std::size_t>(grid.nx) * grid.ny,
                                 0);
  auto idx = [&](int i, int j) {
    return static_cast<std::size_t>(i) * grid.ny + j;
  };
  for (const auto& s : gt.samples) {
    for (const auto& p : model.points) {
      auto [pos, vel] = point_world(s.state, p);
      detail::CellLocator loc = detail::locate_cell(grid, pos.x, pos.y);
      if (!loc.in_bounds) continue;
      double u = std::clamp(loc.gx - loc.i0, 0.0, 1.0);
      double v = std::clamp(loc.gy - loc.j0, 0.0, 1.0);
      double w[4] = {(1 - u) * (1 - v), u * (1 - v), (1 - u) * v, u * v};
      int ci[4] = {loc.i0, loc.i0 + 1, loc.i0, loc.i0 + 1};
      int cj[4] = {loc.j0, loc.j0, loc.j0 + 1, loc.j0 + 1};
      for (int c = 0; c < 4; ++c)
        if (w[c] > 0) mask[idx(ci[c], cj[c])] = 1;
    }
  }
  return mask;
}

double composite_heightmap_loss(const HeightMap& pred,
                                const HeightMap& optimized,
                                const std::vector<std::uint8_t>& mask,
                                const HeightMap& lidar, double lambda) {
  pred.validate();
  optimized.validate();
  lidar.validate();
  if (!(pred.grid == optimized.grid) || !(pred.grid == lidar.grid))
    throw InputError("composite_heightmap_loss: grid mismatch");
  if (mask.size() != pred.h.size())
    throw InputError("composite_heightmap_loss: mask size mismatch");
  if (lambda < 0)
    throw InputError("composite_heightmap_loss: lambda must be >= 0");
  double masked = 0, reg = 0;
  for (std::size_t k = 0; k < pred.h.size(); ++k) {
    double dm = pred.h[k] - optimized.h[k];
    if (mask[k]) masked += dm * dm;
    double dl = pred.h[k] - lidar.h[k];
    reg += dl * dl;
  }
  return masked + lambda * reg;
}

OptimReport optimize_terrain(const Trajectory& gt, const HeightMap& initial,
                             const RobotModel& model, const SimConfig& cfg,
                             const OptimHyper& hyper) {
  gt.validate();
  initial.validate();
  model.validate();
  cfg.validate();

  std::vector<Chunk> chunks = make_chunks(gt, hyper.chunk_duration, &model);

  const std::size_t ncells = initial.h.size();
  // e and d are optimized through softplus so they stay non-negative;
  // h is unconstrained.
  std::vector<double> h_raw = initial.h;
  std::vector<double> e_raw(ncells), d_raw(ncells);
  for (std::size_t k = 0; k < ncells; ++k) {
    e_raw[k] = detail::softplus_inv(std::max(initial.e[k], 1e-8));
    d_raw[k] = detail::softplus_inv(std::max(initial.d[k], 1e-8));
  }

  auto build_map = [&]() {
    HeightMap m = initial;
    m.h = h_raw;
    for (std::size_t k = 0; k < ncells; ++k) {
      m.e[k] = detail::softplus(e_raw[k]);
      m.d[k] = detail::softplus(d_raw[k]);
    }
    return m;
  };

  auto eval_loss_grad = [&](const HeightMap& map, std::vector<double>* gh,
                            std::vector<double>* ge, std::vector<double>* gd) {
    double total = 0;
    if (gh) {
      gh->assign(ncells, 0.0);
      ge->assign(ncells, 0.0);
      gd->assign(ncells, 0.0);
    }
    SimConfig ccfg = cfg;
    for (const auto& chunk : chunks) {
      ccfg.duration = chunk.duration;
      if (!gh) {
        Rollout r = simulate(chunk.initial_state, map, chunk.waypoint, model,
                             ccfg, hyper.contact);
        total += loss_and_grad(r.trajectory, chunk.gt, hyper.weights, nullptr,
                               nullptr);
        continue;
      }
      auto [rollout, tape] =
          rollout_with_tape(chunk.initial_state, map, chunk.waypoint, model,
                            ccfg, hyper.contact);
      TrajectoryGrad upstream;
      total += loss_and_grad(rollout.trajectory, chunk.gt, hyper.weights,
                             nullptr, &upstream);
      GradientBundle bundle = backward(tape, upstream);
      for (const auto& [key, g] : bundle.cells) {
        std::size_t k = map.index(key.i, key.j);
        (*gh)[k] += g.h;
        (*ge)[k] += g.e;
        (*gd)[k] += g.d;
      }
    }
    return total;
  };

  auto auto_scale = [&](double requested, const std::vector<double>& channel) {
    if (requested > 0) return requested;
    double mean = 0;
    for (double v : channel) mean += v;
    mean /= static_cast<double>(std::max<std::size_t>(channel.size(), 1));
    return std::max(mean, 1.0);
  };
  const double scale_e = auto_scale(hyper.lr_scale_e, initial.e);
  const double scale_d = auto_scale(hyper.lr_scale_d, initial.d);

  OptimReport report;
  report.iterations = hyper.iterations;

  // Adam moments over the concatenated (h, e, d) raw parameters.
  const double beta1 = 0.9, beta2 = 0.999, adam_eps = 1e-8;
  std::vector<double> m1(3 * ncells, 0.0), m2(3 * ncells, 0.0);

  std::vector<double> gh, ge, gd;
  for (int iter = 0; iter < hyper.iterations; ++iter) {
    HeightMap map = build_map();
    double loss = eval_loss_grad(map, &gh, &ge, &gd);
    if (!std::isfinite(loss))
      throw NumericalError("optimize_terrain: non-finite loss at iteration " +
                           std::to_string(iter));
    report.loss_curve.push_back(loss);

    // Chain through the softplus reparameterization.
    for (std::size_t k = 0; k < ncells; ++k) {
      ge[k] *= detail::sigmoid(e_raw[k]);
      gd[k] *= detail::sigmoid(d_raw[k]);
    }
    auto update = [&](std::vector<double>& param, std::vector<double>& grad,
                      std::size_t offset, bool enabled, double lr) {
      if (!enabled) return;
      for (std::size_t k = 0; k < ncells; ++k) {
        double g = grad[k];
        if (hyper.optimizer == OptimizerKind::kGradientDescent) {
          param[k] -= lr * g;
          continue;
        }
        std::size_t a = offset + k;
        m1[a] = beta1 * m1[a] + (1 - beta1) * g;
        m2[a] = beta2 * m2[a] + (1 - beta2) * g * g;
        double mhat = m1[a] / (1 - std::pow(beta1, iter + 1));
        double vhat = m2[a] / (1 - std::pow(beta2, iter + 1));
        param[k] -= lr * mhat / (std::sqrt(vhat) + adam_eps);
      }
    };
    update(h_raw, gh, 0, hyper.optimize_h, hyper.learning_rate);
    update(e_raw, ge, ncells, hyper.optimize_e,
           hyper.learning_rate * scale_e);
    update(d_raw, gd, 2 * ncells, hyper.optimize_d,
           hyper.learning_rate * scale_d);
  }

  report.final_map = build_map();
  double final_loss = eval_loss_grad(report.final_map, nullptr, nullptr, nullptr);
  report.loss_curve.push_back(final_loss);
  report.converged =
      !report.loss_curve.empty() &&
      final_loss <= 0.01 * std::max(report.loss_curve.front(), 1e-300);
  return report;
}

}  // namespace terradyn
