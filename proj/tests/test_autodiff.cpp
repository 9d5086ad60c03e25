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

#include "terradyn/autodiff.hpp"
#include "terradyn/scenarios.hpp"

using namespace terradyn;

namespace {

bool states_bitwise_equal(const RigidState& a, const RigidState& b) {
  for (int k = 0; k < 3; ++k)
    if (a.x[k] != b.x[k] || a.v[k] != b.v[k] || a.omega[k] != b.omega[k])
      return false;
  for (int k = 0; k < 9; ++k)
    if (a.R.m[k] != b.R.m[k]) return false;
  return true;
}

// Independent contact counter: re-simulate and count (step, point) pairs
// with the point at or below the interpolated terrain height.
std::size_t count_contacts(const RigidState& s0, const HeightMap& map,
                           const WaypointControl& u, const RobotModel& model,
                           const SimConfig& cfg, ContactModelKind kind) {
  std::size_t count = 0;
  SimConfig one = cfg;
  one.duration = cfg.dt;
  RigidState s = s0;
  std::size_t nsteps =
      static_cast<std::size_t>(std::floor(cfg.duration / cfg.dt + 1e-9));
  for (std::size_t step = 0; step < nsteps; ++step) {
    for (const auto& p : model.points) {
      auto [pos, vel] = point_world(s, p);
      TerrainSample ts = sample(map, pos.x, pos.y);
      if (ts.in_bounds && pos.z <= ts.h) ++count;
    }
    s = euler_step(s, u, make_params(model), map, kind, cfg.dt);
  }
  return count;
}

}  // namespace

TEST_CASE("rollout_with_tape is bit-identical to simulate") {
  for (const char* name : {"free_fall", "drop_test", "bump_terrain"}) {
    Scenario sc = make_scenario(name, 5);
    sc.cfg.duration = std::min(sc.cfg.duration, 1.0);
    Rollout plain = simulate(sc.s0, sc.map, sc.waypoint, sc.robot, sc.cfg,
                             sc.contact);
    auto [taped, tape] = rollout_with_tape(sc.s0, sc.map, sc.waypoint,
                                           sc.robot, sc.cfg, sc.contact);
    REQUIRE(taped.trajectory.samples.size() == plain.trajectory.samples.size());
    for (std::size_t k = 0; k < plain.trajectory.samples.size(); ++k)
      CHECK(states_bitwise_equal(plain.trajectory.samples[k].state,
                                 taped.trajectory.samples[k].state));
  }
}

TEST_CASE("tape replay reproduces the recorded forward pass") {
  Scenario sc = make_scenario("drop_test");
  sc.cfg.duration = 0.5;
  auto [taped, tape] = rollout_with_tape(sc.s0, sc.map, sc.waypoint, sc.robot,
                                         sc.cfg, sc.contact);
  auto vals = tape.ops.replay();
  const auto& nodes = tape.ops.nodes();
  for (std::size_t k = 0; k < nodes.size(); ++k) CHECK(vals[k] == nodes[k].val);
}

TEST_CASE("contact event accounting") {
  SUBCASE("free fall records no contact events") {
    Scenario sc = make_scenario("free_fall");
    auto [taped, tape] = rollout_with_tape(sc.s0, sc.map, sc.waypoint,
                                           sc.robot, sc.cfg, sc.contact);
    CHECK(tape.diagnostics.contact_events == 0);
  }
  SUBCASE("drop test count matches an independent re-simulation") {
    Scenario sc = make_scenario("drop_test");
    sc.cfg.duration = 2.0;
    auto [taped, tape] = rollout_with_tape(sc.s0, sc.map, sc.waypoint,
                                           sc.robot, sc.cfg, sc.contact);
    std::size_t expected = count_contacts(sc.s0, sc.map, sc.waypoint,
                                          sc.robot, sc.cfg, sc.contact);
    CHECK(tape.diagnostics.contact_events == expected);
  }
}

TEST_CASE("grad_check passes on smooth random instances") {
  int checked = 0;
  for (unsigned seed = 100; seed < 106; ++seed) {
    GradCheckProblem p = random_smooth_problem(seed);
    GradCheckReport rep = grad_check(p);
    if (rep.boundary_skipped) continue;
    ++checked;
    INFO("seed ", seed, " max_rel_error ", rep.max_rel_error);
    CHECK(rep.passed);
  }
  CHECK(checked >= 4);  // the generator should rarely hit a boundary
}

TEST_CASE("terrain cell gradients match finite differences directly") {
  GradCheckProblem p = random_smooth_problem(7);
  auto [rollout, tape] = rollout_with_tape(p.s0, p.map, p.u, p.model, p.cfg,
                                           p.kind);
  TrajectoryGrad up;
  position_loss(rollout.trajectory, p.targets, &up);
  GradientBundle bundle = backward(tape, up);
  REQUIRE(!bundle.cells.empty());

  double eps = 1e-5;
  int tested = 0;
  for (const auto& [key, grad] : bundle.cells) {
    if (tested++ >= 4) break;
    HeightMap plus = p.map, minus = p.map;
    plus.h_at(key.i, key.j) += eps;
    minus.h_at(key.i, key.j) -= eps;
    double lp = position_loss(
        simulate(p.s0, plus, p.u, p.model, p.cfg, p.kind).trajectory,
        p.targets);
    double lm = position_loss(
        simulate(p.s0, minus, p.u, p.model, p.cfg, p.kind).trajectory,
        p.targets);
    double fd = (lp - lm) / (2 * eps);
    CHECK(grad.h == doctest::Approx(fd).epsilon(1e-4));
  }
}

TEST_CASE("zero upstream gradient yields a zero bundle") {
  GradCheckProblem p = random_smooth_problem(3);
  auto [rollout, tape] = rollout_with_tape(p.s0, p.map, p.u, p.model, p.cfg,
                                           p.kind);
  TrajectoryGrad up;
  up.samples.assign(rollout.trajectory.samples.size(), {});
  GradientBundle bundle = backward(tape, up);
  CHECK(norm(bundle.d_x0) == 0.0);
  CHECK(norm(bundle.d_v0) == 0.0);
  for (const auto& [key, g] : bundle.cells) {
    CHECK(g.h == 0.0);
    CHECK(g.e == 0.0);
    CHECK(g.d == 0.0);
  }
}

TEST_CASE("tape node cap triggers NumericalError") {
  Scenario sc = make_scenario("drop_test");
  sc.cfg.duration = 1.0;
  sc.cfg.max_tape_nodes = 1000;
  CHECK_THROWS_AS(rollout_with_tape(sc.s0, sc.map, sc.waypoint, sc.robot,
                                    sc.cfg, sc.contact),
                  NumericalError);
}

TEST_CASE("boundary instances are skipped, not failed") {
  // Robot resting exactly at the contact boundary: |p_z - h| = 0.
  GradCheckProblem p = random_smooth_problem(1);
  p.s0.x = {0, 0, 0.1};  // bottom points exactly at h = 0
  for (auto& h : p.map.h) h = 0.0;
  p.s0.v = {0, 0, 0};
  GradCheckReport rep = grad_check(p);
  CHECK(rep.boundary_skipped);
  CHECK(rep.passed);
}
