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

// Force and velocity laws: gravity, spring-damper terrain contact (vertical
// or surface-normal), the embedded waypoint P-controller, and the assembled
// state derivative. Everything is templated on the scalar so the autodiff
// rollout records exactly the operations the plain rollout performs.

#ifndef TERRADYN_DYNAMICS_HPP_
#define TERRADYN_DYNAMICS_HPP_

#include <cmath>
#include <limits>
#include <utility>
#include <vector>

#include "terradyn/core.hpp"
#include "terradyn/tape.hpp"
#include "terradyn/terrain.hpp"
#include "terradyn/vecmat.hpp"

namespace terradyn {

using ad::value_of;

inline double sqrt_t(double x) { return std::sqrt(x); }
inline ad::Var sqrt_t(const ad::Var& x) { return ad::sqrt(x); }

enum class ContactModelKind { kVertical, kNormal };

struct ForceSet {
  std::vector<Vec3d> forces;
  std::vector<std::uint8_t> contact;
};

// Robot parameters in the scalar domain of the rollout. Differentiable
// quantities (masses, total mass, inertia) carry type T; controller gains,
// limits and gravity stay plain doubles.
template <class T>
struct ModelParamsT {
  std::vector<Vec3d> points;
  std::vector<T> masses;
  T total_mass{};
  Mat3<T> inertia = Mat3<T>::identity();
  Mat3<T> inertia_inv = Mat3<T>::identity();
  double k_v = 1, k_theta = 1, k_phi = 1;
  double v_max = 1, omega_max = 1;
  double gravity = 9.81;
  // Opt-in standard gyroscopic term -J^-1 (omega x J omega).
  bool gyroscopic = false;
};

inline ModelParamsT<double> make_params(const RobotModel& m,
                                        bool gyroscopic = false) {
  ModelParamsT<double> p;
  p.points = m.points;
  p.masses = m.masses;
  p.total_mass = m.total_mass;
  p.inertia = m.inertia;
  p.inertia_inv = inverse(m.inertia);
  p.k_v = m.k_v;
  p.k_theta = m.k_theta;
  p.k_phi = m.k_phi;
  p.v_max = m.v_max;
  p.omega_max = m.omega_max;
  p.gravity = m.gravity;
  p.gyroscopic = gyroscopic;
  return p;
}

template <class T>
struct DerivT {
  Vec3<T> dx;
  Vec3<T> dv;
  Mat3<T> dR;
  Vec3<T> domega;
  std::vector<Vec3<T>> point_forces;
  std::vector<std::uint8_t> contact;
};

using Deriv = DerivT<double>;

// Distances to the nearest branch decision (contact on/off, controller
// clamps) seen during evaluation; gradient checks use these to stay away
// from subgradient territory.
struct BranchDiagnostics {
  double min_contact_margin = std::numeric_limits<double>::infinity();
  double min_speed_clamp_margin = std::numeric_limits<double>::infinity();
  double min_omega_clamp_margin = std::numeric_limits<double>::infinity();
  std::size_t contact_events = 0;
};

// World-frame position and velocity of a body point.
template <class T>
std::pair<Vec3<T>, Vec3<T>> point_world(const StateT<T>& s,
                                        const Vec3d& body_point) {
  Vec3<T> r{body_point.x * s.R(0, 0) + body_point.y * s.R(0, 1) +
                body_point.z * s.R(0, 2),
            body_point.x * s.R(1, 0) + body_point.y * s.R(1, 1) +
                body_point.z * s.R(1, 2),
            body_point.x * s.R(2, 0) + body_point.y * s.R(2, 1) +
                body_point.z * s.R(2, 2)};
  Vec3<T> pos = s.x + r;
  Vec3<T> vel = s.v + cross(s.omega, r);
  return {pos, vel};
}

// Gravity plus a spring-damper acting along world z while the point is at
// or below the interpolated terrain height.
template <class T>
Vec3<T> vertical_force(const Vec3<T>& pos, const Vec3<T>& vel, const T& mass,
                       const TerrainSampleT<T>& s, double gravity,
                       bool* in_contact = nullptr) {
  Vec3<T> f{T(0), T(0), -mass * gravity};
  bool contact = s.in_bounds && value_of(pos.z) <= value_of(s.h);
  if (contact) f.z = f.z + (s.e * (s.h - pos.z) - s.d * vel.z);
  if (in_contact) *in_contact = contact;
  return f;
}

// Gravity plus a spring-damper acting along the terrain surface normal;
// penetration is the vertical distance projected on the normal. Degenerates
// to vertical_force when n = (0, 0, 1).
template <class T>
Vec3<T> normal_force(const Vec3<T>& pos, const Vec3<T>& vel, const T& mass,
                     const TerrainSampleT<T>& s, double gravity,
                     bool* in_contact = nullptr) {
  Vec3<T> f{T(0), T(0), -mass * gravity};
  bool contact = s.in_bounds && value_of(pos.z) <= value_of(s.h);
  if (contact) {
    T depth = (s.h - pos.z) * s.n.z;
    T along = vel.x * s.n.x + vel.y * s.n.y + vel.z * s.n.z;
    T mag = s.e * depth - s.d * along;
    f.x = f.x + mag * s.n.x;
    f.y = f.y + mag * s.n.y;
    f.z = f.z + mag * s.n.z;
  }
  if (in_contact) *in_contact = contact;
  return f;
}

// Generic wrap into (-pi, pi]; the multiple of 2*pi is chosen on the value
// so the adjustment is a differentiable constant shift.
template <class T>
T wrap_angle_t(const T& a) {
  const double two_pi = 2.0 * M_PI;
  double k = std::round(value_of(a) / two_pi);
  T r = a - two_pi * k;
  if (value_of(r) <= -M_PI) r = r + two_pi;
  if (value_of(r) > M_PI) r = r - two_pi;
  return r;
}

// Saturated track velocities of the embedded waypoint P-controller.
template <class T>
std::pair<Vec3<T>, Vec3<T>> track_velocities(
    const StateT<T>& s, const WaypointT<T>& u, const ModelParamsT<T>& model,
    BranchDiagnostics* diag = nullptr) {
  using scalar::smax_c;
  using scalar::smin_c;
  using std::atan2;
  using std::cos;
  using std::sin;
  using ad::atan2;
  using ad::cos;
  using ad::sin;

  T phi = atan2(s.R(1, 0), s.R(0, 0));
  T ex = s.x.x - u.x_g;
  T ey = s.x.y - u.y_g;
  bool at_goal = value_of(ex) == 0.0 && value_of(ey) == 0.0;
  // At the goal both the distance and the bearing are left constant; sqrt
  // and atan2 have no derivative there.
  T dist = at_goal ? T(0) : sqrt_t(ex * ex + ey * ey);
  T speed = smin_c(model.k_v * dist, model.v_max);
  Vec3<T> v_t{speed * cos(phi), speed * sin(phi), T(0)};

  T dtheta = at_goal ? T(0) : wrap_angle_t(atan2(u.y_g - s.x.y, u.x_g - s.x.x) - phi);
  T dphi = wrap_angle_t(u.phi_g - phi);
  T wz_raw = model.k_theta * dtheta + model.k_phi * dphi;
  T wz = smax_c(smin_c(wz_raw, model.omega_max), -model.omega_max);
  Vec3<T> w_t{T(0), T(0), wz};

  if (diag) {
    diag->min_speed_clamp_margin =
        std::min(diag->min_speed_clamp_margin,
                 std::abs(model.k_v * value_of(dist) - model.v_max));
    diag->min_omega_clamp_margin =
        std::min(diag->min_omega_clamp_margin,
                 std::abs(std::abs(value_of(wz_raw)) - model.omega_max));
  }
  return {v_t, w_t};
}

// Full state derivative of the combined ODE: track-augmented kinematics,
// per-point terrain forces, and torque about the COM with world-frame arms.
template <class T, class Cells>
DerivT<T> state_derivative_t(const StateT<T>& s, const WaypointT<T>& u,
                             const ModelParamsT<T>& model, const GridSpec& grid,
                             Cells&& cells, ContactModelKind kind,
                             BranchDiagnostics* diag = nullptr) {
  DerivT<T> out;
  auto [v_t, w_t] = track_velocities(s, u, model, diag);

  const std::size_t n = model.points.size();
  out.point_forces.resize(n);
  out.contact.resize(n);
  Vec3<T> force_sum{};
  Vec3<T> torque{};
  const bool want_normal = kind == ContactModelKind::kNormal;
  for (std::size_t i = 0; i < n; ++i) {
    auto [pos, vel] = point_world(s, model.points[i]);
    TerrainSampleT<T> ts =
        detail::sample_impl<T>(grid, cells, pos.x, pos.y, want_normal);
    bool contact = false;
    Vec3<T> f = want_normal
                    ? normal_force(pos, vel, model.masses[i], ts,
                                   model.gravity, &contact)
                    : vertical_force(pos, vel, model.masses[i], ts,
                                     model.gravity, &contact);
    out.point_forces[i] = f;
    out.contact[i] = contact ? 1 : 0;
    if (diag) {
      if (ts.in_bounds)
        diag->min_contact_margin =
            std::min(diag->min_contact_margin,
                     std::abs(value_of(pos.z) - value_of(ts.h)));
      if (contact) ++diag->contact_events;
    }
    force_sum += f;
    Vec3<T> arm = pos - s.x;  // world-frame offset R * p_body
    torque += cross(arm, f);
  }

  out.dx = s.v + v_t;
  out.dv = (1.0 / model.total_mass) * force_sum;
  out.dR = skew(s.omega + w_t) * s.R;
  if (model.gyroscopic) torque = torque - cross(s.omega, model.inertia * s.omega);
  out.domega = model.inertia_inv * torque;
  return out;
}

// Convenience double-scalar entry point over a HeightMap.

inline Deriv state_derivative(const RigidState& s, const WaypointControl& u,
                              const ModelParamsT<double>& model,
                              const HeightMap& map, ContactModelKind kind,
                              BranchDiagnostics* diag = nullptr) {
  return state_derivative_t<double>(s, u, model, map.grid, map_channel_accessor(map), kind,
                                    diag);
}

}  // namespace terradyn

#endif  // TERRADYN_DYNAMICS_HPP_
