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

#include "terradyn/eval.hpp"
#include "terradyn/scenarios.hpp"

using namespace terradyn;

TEST_CASE("rotation_angle_deg") {
  Mat3d I = Mat3d::identity();
  CHECK(rotation_angle_deg(I, I) == 0.0);
  CHECK(rotation_angle_deg(I, rot_z(M_PI / 6)) ==
        doctest::Approx(30.0).epsilon(1e-12));
  CHECK(rotation_angle_deg(rot_z(0.5), rot_z(0.5)) ==
        doctest::Approx(0.0).epsilon(1e-9));
  // Relative angle is what matters, not the absolute orientations.
  CHECK(rotation_angle_deg(rot_z(1.0), rot_z(1.0 + M_PI / 4)) ==
        doctest::Approx(45.0).epsilon(1e-9));
}

TEST_CASE("tracking_errors") {
  Scenario sc = make_scenario("ramp_drive");
  sc.cfg.duration = 2.0;
  Trajectory gt = simulate(sc.s0, sc.map, sc.waypoint, sc.robot, sc.cfg,
                           sc.contact)
                      .trajectory;

  SUBCASE("self comparison is exactly zero") {
    TrackingReport r = tracking_errors(gt, gt);
    CHECK(r.delta_x == 0.0);
    CHECK(r.delta_R_deg == doctest::Approx(0.0).epsilon(1e-7));
    CHECK(r.n == gt.samples.size());
  }

  SUBCASE("30 degree yaw offset reads as 30 degrees") {
    Trajectory rotated = gt;
    for (auto& s : rotated.samples) s.state.R = s.state.R * rot_z(M_PI / 6);
    TrackingReport r = tracking_errors(rotated, gt);
    CHECK(std::abs(r.delta_R_deg - 30.0) <= 1e-9);
    CHECK(r.delta_x == doctest::Approx(0.0));
  }

  SUBCASE("(0.3, 0.4, 0) offset reads as 0.5 m") {
    Trajectory shifted = gt;
    for (auto& s : shifted.samples) {
      s.state.x.x += 0.3;
      s.state.x.y += 0.4;
    }
    TrackingReport r = tracking_errors(shifted, gt);
    CHECK(std::abs(r.delta_x - 0.5) <= 1e-12);
  }

  SUBCASE("empty ground truth throws") {
    Trajectory empty;
    CHECK_THROWS_AS(tracking_errors(gt, empty), InputError);
  }
}

TEST_CASE("mechanical_energy closed forms") {
  RobotModel robot = point_robot(2.0);
  GridSpec g;
  g.nx = 4;
  g.ny = 4;
  g.resolution = 1.0;
  g.origin_x = -2;
  g.origin_y = -2;

  SUBCASE("airborne point mass: kinetic + potential") {
    HeightMap map(g, -5.0);
    RigidState s;
    s.x = {0, 0, 2.0};
    s.v = {3, 0, 0};
    double e = mechanical_energy(s, robot, map, ContactModelKind::kVertical);
    // 0.5*2*9 + 2*9.81*2
    CHECK(e == doctest::Approx(9.0 + 39.24).epsilon(1e-12));
  }

  SUBCASE("penetrating contact adds 0.5 e pen^2") {
    HeightMap map(g, 0.0, 100.0, 10.0);
    RigidState s;
    s.x = {0, 0, -0.1};
    double e = mechanical_energy(s, robot, map, ContactModelKind::kVertical);
    // potential 2*9.81*(-0.1) + elastic 0.5*100*0.01
    CHECK(e == doctest::Approx(-1.962 + 0.5).epsilon(1e-12));
  }

  SUBCASE("rotational term uses the inertia tensor") {
    HeightMap map(g, -5.0);
    RobotModel box = default_robot();
    RigidState s;
    s.x = {0, 0, 0};
    s.omega = {0, 0, 2.0};
    double e0 = mechanical_energy(s, box, map, ContactModelKind::kVertical);
    double expected_rot = 0.5 * dot(s.omega, box.inertia * s.omega);
    RigidState still = s;
    still.omega = {0, 0, 0};
    double e1 = mechanical_energy(still, box, map,
                                  ContactModelKind::kVertical);
    CHECK(e0 - e1 == doctest::Approx(expected_rot).epsilon(1e-12));
  }
}

TEST_CASE("compare_encoders ranks the true terrain best") {
  Scenario sc = make_scenario("bump_terrain");
  sc.cfg.duration = 3.0;
  Trajectory gt = simulate(sc.s0, sc.map, sc.waypoint, sc.robot, sc.cfg,
                           sc.contact)
                      .trajectory;
  HeightMap wrong = sc.map;
  for (auto& h : wrong.h) h += 0.05;

  SimConfig cfg;
  cfg.dt = sc.cfg.dt;
  auto rows = compare_encoders(gt, {{"true", sc.map}, {"shifted", wrong}},
                               sc.robot, cfg, sc.contact);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].first == "true");
  CHECK(rows[1].first == "shifted");
  // The chunk waypoints re-derive the control, so even the true terrain
  // does not reproduce the gt exactly -- but it should track it better
  // than a biased terrain, and reasonably well in absolute terms.
  CHECK(rows[0].second.delta_x <= rows[1].second.delta_x + 1e-12);
  CHECK(rows[0].second.delta_x <= 0.5);
  CHECK(rows[0].second.n > 0);
}
