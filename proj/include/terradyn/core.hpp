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

#ifndef TERRADYN_CORE_HPP_
#define TERRADYN_CORE_HPP_

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "terradyn/vecmat.hpp"

namespace terradyn {

// Bad or inconsistent input (files, configs, shapes). CLI exit code 2.
struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Non-finite values or divergence during computation. CLI exit code 3.
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// 12-DOF rigid state: COM position, linear velocity, world<-body rotation,
// world-frame angular velocity.
template <class T>
struct StateT {
  Vec3<T> x{};
  Vec3<T> v{};
  Mat3<T> R = Mat3<T>::identity();
  Vec3<T> omega{};
};

using RigidState = StateT<double>;

template <class T>
struct WaypointT {
  T x_g{};
  T y_g{};
  T phi_g{};
};

using WaypointControl = WaypointT<double>;

// Rigid body as a point cloud with per-point masses plus controller
// parameters. Body points are relative to the center of mass.
struct RobotModel {
  std::vector<Vec3d> points;
  std::vector<double> masses;
  double total_mass = 0;
  Mat3d inertia = Mat3d::identity();
  double k_v = 1.0;
  double k_theta = 1.0;
  double k_phi = 1.0;
  double v_max = 1.0;
  double omega_max = 1.0;
  double gravity = 9.81;

  // Throws InputError on violated invariants (mass consistency, SPD
  // inertia, positive limits).
  void validate() const;
};

struct TrajectorySample {
  double t = 0;
  RigidState state;
};

struct Trajectory {
  std::vector<TrajectorySample> samples;

  bool empty() const { return samples.empty(); }
  double start_time() const { return samples.front().t; }
  double end_time() const { return samples.back().t; }
  double span() const { return end_time() - start_time(); }
  void validate() const;
};

struct SimConfig {
  double dt = 0.01;
  double duration = 1.0;
  int record_stride = 1;
  // Hard cap on autodiff tape nodes; rollouts that would exceed it fail
  // loudly instead of exhausting memory.
  std::size_t max_tape_nodes = 50'000'000;

  void validate() const {
    if (!(dt > 0)) throw InputError("SimConfig: dt must be > 0");
    if (!(duration >= dt)) throw InputError("SimConfig: duration must be >= dt");
    if (record_stride < 1)
      throw InputError("SimConfig: record_stride must be >= 1");
  }
};

// Wrap into (-pi, pi].
inline double wrap_angle(double a) {
  const double two_pi = 2.0 * M_PI;
  double k = std::round(a / two_pi);
  double r = a - two_pi * k;
  if (r <= -M_PI) r += two_pi;
  if (r > M_PI) r -= two_pi;
  return r;
}

// Yaw extracted from the rotation matrix, in (-pi, pi].
inline double heading_of(const RigidState& s) {
  return std::atan2(s.R(1, 0), s.R(0, 0));
}

inline void RobotModel::validate() const {
  if (points.empty()) throw InputError("RobotModel: needs at least one point");
  if (points.size() != masses.size())
    throw InputError("RobotModel: points and masses length mismatch");
  double sum = 0;
  for (double m : masses) {
    if (!(m > 0)) throw InputError("RobotModel: masses must be positive");
    sum += m;
  }
  if (std::abs(sum - total_mass) > 1e-9 * std::max(1.0, std::abs(total_mass)))
    throw InputError("RobotModel: total_mass does not match sum of masses");
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c)
      if (std::abs(inertia(r, c) - inertia(c, r)) > 1e-9)
        throw InputError("RobotModel: inertia must be symmetric");
  // Sylvester criterion for positive definiteness.
  double d1 = inertia(0, 0);
  double d2 = inertia(0, 0) * inertia(1, 1) - inertia(0, 1) * inertia(1, 0);
  double d3 = determinant(inertia);
  if (!(d1 > 0 && d2 > 0 && d3 > 0))
    throw InputError("RobotModel: inertia must be positive-definite");
  if (!(k_v > 0 && k_theta > 0 && k_phi > 0))
    throw InputError("RobotModel: controller gains must be positive");
  if (!(v_max > 0 && omega_max > 0))
    throw InputError("RobotModel: saturation limits must be positive");
  if (!(gravity >= 0) || !std::isfinite(gravity))
    throw InputError("RobotModel: gravity must be finite and non-negative");
}

inline void Trajectory::validate() const {
  if (samples.empty()) throw InputError("Trajectory: needs at least one sample");
  for (std::size_t i = 1; i < samples.size(); ++i)
    if (!(samples[i].t > samples[i - 1].t))
      throw InputError("Trajectory: timestamps must be strictly increasing");
}

}  // namespace terradyn

#endif  // TERRADYN_CORE_HPP_
