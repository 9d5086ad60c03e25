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

#include <doctest.h>

#include <cmath>

#include "terradyn/optim.hpp"
#include "terradyn/scenarios.hpp"

using namespace terradyn;

namespace {

Trajectory drive_gt(double duration) {
  Scenario sc = make_scenario("ramp_drive");
  sc.cfg.duration = duration;
  return simulate(sc.s0, sc.map, sc.waypoint, sc.robot, sc.cfg, sc.contact)
      .trajectory;
}

}  // namespace

TEST_CASE("trajectory_loss") {
  Trajectory gt = drive_gt(2.0);
  SUBCASE("identical trajectories have zero loss") {
    TrajectoryLoss l = trajectory_loss(gt, gt);
    CHECK(l.value == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(l.residuals.size() == gt.samples.size());
  }
  SUBCASE("known offset gives N * |offset|^2") {
    Trajectory shifted = gt;
    for (auto& s : shifted.samples) s.state.x.y += 0.1;
    TrajectoryLoss l = trajectory_loss(shifted, gt);
    CHECK(l.value ==
          doctest::Approx(0.01 * double(gt.samples.size())).epsilon(1e-9));
  }
  SUBCASE("rotation term activates with w_R") {
    Trajectory rotated = gt;
    for (auto& s : rotated.samples) s.state.R = s.state.R * rot_z(0.3);
    LossWeights w{1.0, 1.0};
    TrajectoryLoss base = trajectory_loss(rotated, gt, {1.0, 0.0});
    TrajectoryLoss with_rot = trajectory_loss(rotated, gt, w);
    CHECK(with_rot.value > base.value);
  }
  SUBCASE("timestamp outside prediction span throws") {
    Trajectory longer = gt;
    longer.samples.push_back(
        {gt.samples.back().t + 10.0, gt.samples.back().state});
    CHECK_THROWS_AS(trajectory_loss(gt, longer), InputError);
  }
}

TEST_CASE("make_chunks") {
  Trajectory gt = drive_gt(3.0);
  std::vector<Chunk> chunks = make_chunks(gt, 1.0);
  CHECK(chunks.size() == 3);
  for (std::size_t c = 0; c < chunks.size(); ++c) {
    const Chunk& ch = chunks[c];
    // Chunk timestamps are relative to the chunk start.
    CHECK(ch.gt.samples.front().t == doctest::Approx(0.0));
    CHECK(ch.gt.samples.back().t == doctest::Approx(1.0).epsilon(1e-9));
    // Initial state re-initialized from the gt.
    RigidState ref = sample_at(gt, double(c));
    CHECK(ch.initial_state.x.x == doctest::Approx(ref.x.x));
    // Waypoint one chunk past the chunk end (extrapolated with the final
    // velocity once the recorded span runs out), so the re-derived control
    // does not decelerate where the recorded run kept driving.
    double tw = double(c) + 2.0;
    RigidState goal;
    if (tw <= gt.samples.back().t) {
      goal = sample_at(gt, tw);
    } else {
      goal = gt.samples.back().state;
      goal.x += (tw - gt.samples.back().t) * goal.v;
    }
    CHECK(ch.waypoint.x_g == doctest::Approx(goal.x.x));
    CHECK(ch.waypoint.y_g == doctest::Approx(goal.x.y));
    CHECK(ch.waypoint.phi_g == doctest::Approx(heading_of(goal)));
  }
  SUBCASE("too-short trajectory throws") {
    Trajectory short_gt = drive_gt(0.5);
    CHECK_THROWS_AS(make_chunks(short_gt, 1.0), InputError);
  }
  SUBCASE("model-aware waypoints reproduce the recording on the true map") {
    // With the controller gains available the chunk waypoints reconstruct
    // the recorded goal, so re-simulating each chunk on the terrain that
    // produced the gt must match it almost exactly.
    Scenario sc = make_scenario("ramp_drive");
    sc.cfg.duration = 3.0;
    Trajectory full =
        simulate(sc.s0, sc.map, sc.waypoint, sc.robot, sc.cfg, sc.contact)
            .trajectory;
    double floor_loss = 0;
    for (const Chunk& ch : make_chunks(full, 1.0, &sc.robot)) {
      SimConfig ccfg = sc.cfg;
      ccfg.duration = ch.duration;
      Rollout r = simulate(ch.initial_state, sc.map, ch.waypoint, sc.robot,
                           ccfg, sc.contact);
      floor_loss += trajectory_loss(r.trajectory, ch.gt).value;
    }
    CHECK(floor_loss < 1e-6);
  }
}

TEST_CASE("flat_initial_map covers the footprint at the lowest start point") {
  Trajectory gt = drive_gt(2.0);
  RobotModel robot = default_robot();
  HeightMap init = flat_initial_map(gt, robot, 0.2, 1.0);
  double z0 = 1e300;
  for (const auto& p : robot.points) {
    auto [pos, vel] = point_world(gt.samples.front().state, p);
    z0 = std::min(z0, pos.z);
  }
  for (double h : init.h) CHECK(h == z0);
  // Every gt robot point projects inside the grid.
  for (const auto& s : gt.samples) {
    for (const auto& p : robot.points) {
      auto [pos, vel] = point_world(s.state, p);
      CHECK(sample(init, pos.x, pos.y).in_bounds);
    }
  }
}

TEST_CASE("traversed_mask marks exactly the bilinear support") {
  RobotModel robot = default_robot();
  GridSpec g;
  g.nx = 10;
  g.ny = 10;
  g.resolution = 0.5;
  g.origin_x = -2.5;
  g.origin_y = -2.5;

  SUBCASE("stationary robot: footprint cells only") {
    Trajectory gt;
    RigidState s;
    gt.samples.push_back({0.0, s});
    auto mask = traversed_mask(gt, robot, g);
    // Brute-force oracle over the same definition.
    std::vector<std::uint8_t> ref(mask.size(), 0);
    HeightMap map(g);
    for (const auto& p : robot.points) {
      auto [pos, vel] = point_world(s, p);
      BilinearWeights w = sample_gradient(map, pos.x, pos.y);
      const int di[4] = {0, 1, 0, 1}, dj[4] = {0, 0, 1, 1};
      for (int c = 0; c < 4; ++c)
        if (w.w[c] > 0)
          ref[map.index(w.i0 + di[c], w.j0 + dj[c])] = 1;
    }
    CHECK(mask == ref);
    std::size_t marked = 0;
    for (auto b : mask) marked += b;
    CHECK(marked > 0);
    CHECK(marked < mask.size());
  }

  SUBCASE("driving marks more cells than standing") {
    Trajectory still;
    still.samples.push_back({0.0, RigidState{}});
    Trajectory moving = drive_gt(2.0);
    auto a = traversed_mask(still, robot, g);
    auto b = traversed_mask(moving, robot, g);
    std::size_t na = 0, nb = 0;
    for (auto v : a) na += v;
    for (auto v : b) nb += v;
    CHECK(nb > na);
  }
}

TEST_CASE("composite_heightmap_loss") {
  GridSpec g;
  g.nx = 3;
  g.ny = 3;
  HeightMap pred(g), opt(g), lidar(g);
  std::vector<std::uint8_t> mask(9, 0);
  mask[4] = 1;
  pred.h[4] = 0.5;  // masked difference 0.5 vs optimized 0
  pred.h[0] = 0.2;  // unmasked: only the lidar term sees it
  double loss = composite_heightmap_loss(pred, opt, mask, lidar, 0.1);
  CHECK(loss == doctest::Approx(0.25 + 0.1 * (0.04 + 0.25)));
  SUBCASE("grid mismatch throws") {
    GridSpec g2 = g;
    g2.nx = 4;
    HeightMap other(g2);
    CHECK_THROWS_AS(composite_heightmap_loss(pred, other, mask, lidar, 0.1),
                    InputError);
  }
  SUBCASE("mask size mismatch throws") {
    std::vector<std::uint8_t> bad(4, 0);
    CHECK_THROWS_AS(composite_heightmap_loss(pred, opt, bad, lidar, 0.1),
                    InputError);
  }
}

TEST_CASE("chunk gradients sum to the full-loss gradient") {
  // The per-chunk losses are independent functions of the shared terrain,
  // so accumulating per-chunk backward passes must equal differentiating
  // the summed loss; verify against finite differences of the total.
  Trajectory gt = drive_gt(2.0);
  Scenario sc = make_scenario("ramp_drive");
  HeightMap map = sc.map;
  SimConfig cfg;
  cfg.dt = 0.01;
  LossWeights w;

  auto chunks = make_chunks(gt, 1.0);
  GradientBundle::CellGrad total{};
  CellKey probe{};
  bool have_probe = false;
  for (const auto& chunk : chunks) {
    SimConfig ccfg = cfg;
    ccfg.duration = chunk.duration;
    auto [rollout, tape] = rollout_with_tape(
        chunk.initial_state, map, chunk.waypoint, sc.robot, ccfg, sc.contact);
    TrajectoryGrad up;
    up.samples.assign(rollout.trajectory.samples.size(), {});
    for (const auto& gs : chunk.gt.samples) {
      // Use only exact-timestamp residuals to keep the oracle simple.
      for (std::size_t k = 0; k < rollout.trajectory.samples.size(); ++k) {
        if (std::abs(rollout.trajectory.samples[k].t - gs.t) < 1e-9) {
          Vec3d r = rollout.trajectory.samples[k].state.x - gs.state.x;
          up.samples[k].d_x += 2.0 * r;
        }
      }
    }
    GradientBundle b = backward(tape, up);
    if (!have_probe && !b.cells.empty()) {
      probe = b.cells.begin()->first;
      have_probe = true;
    }
    auto it = b.cells.find(probe);
    if (it != b.cells.end()) {
      total.h += it->second.h;
      total.e += it->second.e;
      total.d += it->second.d;
    }
  }
  REQUIRE(have_probe);

  auto total_loss = [&](const HeightMap& m) {
    double loss = 0;
    for (const auto& chunk : chunks) {
      SimConfig ccfg = cfg;
      ccfg.duration = chunk.duration;
      Rollout r = simulate(chunk.initial_state, m, chunk.waypoint, sc.robot,
                           ccfg, sc.contact);
      for (const auto& gs : chunk.gt.samples)
        for (std::size_t k = 0; k < r.trajectory.samples.size(); ++k)
          if (std::abs(r.trajectory.samples[k].t - gs.t) < 1e-9) {
            Vec3d d = r.trajectory.samples[k].state.x - gs.state.x;
            loss += dot(d, d);
          }
    }
    return loss;
  };
  double eps = 1e-5;
  HeightMap plus = map, minus = map;
  plus.h_at(probe.i, probe.j) += eps;
  minus.h_at(probe.i, probe.j) -= eps;
  double fd = (total_loss(plus) - total_loss(minus)) / (2 * eps);
  CHECK(total.h == doctest::Approx(fd).epsilon(1e-3));
}

TEST_CASE("optimize_terrain decreases the loss and keeps e, d positive") {
  // Ground truth on a bumpy terrain, init from a flattened copy.
  Scenario sc = make_scenario("bump_terrain");
  sc.cfg.duration = 2.0;
  Trajectory gt = simulate(sc.s0, sc.map, sc.waypoint, sc.robot, sc.cfg,
                           sc.contact)
                      .trajectory;
  HeightMap init = sc.map;
  for (auto& h : init.h) h = 0.0;

  SimConfig cfg;
  cfg.dt = 0.01;
  OptimHyper hyper;
  hyper.iterations = 15;
  hyper.contact = sc.contact;
  OptimReport rep = optimize_terrain(gt, init, sc.robot, cfg, hyper);
  CHECK(rep.loss_curve.size() == 16);
  CHECK(rep.loss_curve.back() < rep.loss_curve.front());
  for (double e : rep.final_map.e) CHECK(e > 0.0);
  for (double d : rep.final_map.d) CHECK(d > 0.0);
  CHECK_NOTHROW(rep.final_map.validate());
}

TEST_CASE("softplus reparameterization helpers") {
  for (double x : {-5.0, -1.0, 0.0, 2.0, 40.0}) {
    double y = detail::softplus(x);
    CHECK(y > 0.0);
    CHECK(detail::softplus_inv(y) == doctest::Approx(x).epsilon(1e-9));
  }
  // Derivative of softplus is the logistic sigmoid.
  double eps = 1e-6;
  for (double x : {-2.0, 0.3, 4.0}) {
    double fd = (detail::softplus(x + eps) - detail::softplus(x - eps)) /
                (2 * eps);
    CHECK(detail::sigmoid(x) == doctest::Approx(fd).epsilon(1e-6));
  }
}
