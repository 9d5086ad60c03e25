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

#include "terradyn/autodiff.hpp"

#include <cmath>
#include <utility>

namespace terradyn {

namespace {

using ad::Var;

struct TapedInputs {
  StateT<Var> s0;
  WaypointT<Var> u;
  ModelParamsT<Var> params;
};

TapedInputs make_leaves(RolloutTape& tape, const RigidState& s0,
                        const WaypointControl& u, const RobotModel& model,
                        bool gyroscopic) {
  ad::Tape& t = tape.ops;
  TapedInputs in;

  auto leaf3 = [&](const Vec3d& v, std::array<std::int32_t, 3>& idx) {
    Var a = t.leaf(v.x), b = t.leaf(v.y), c = t.leaf(v.z);
    idx = {a.idx, b.idx, c.idx};
    return Vec3<Var>{a, b, c};
  };
  in.s0.x = leaf3(s0.x, tape.x0);
  in.s0.v = leaf3(s0.v, tape.v0);
  for (int k = 0; k < 9; ++k) {
    Var r = t.leaf(s0.R.m[k]);
    tape.R0[k] = r.idx;
    in.s0.R.m[k] = r;
  }
  in.s0.omega = leaf3(s0.omega, tape.omega0);
  tape.R0_value = s0.R;

  Var ux = t.leaf(u.x_g), uy = t.leaf(u.y_g), up = t.leaf(u.phi_g);
  tape.u_leaf = {ux.idx, uy.idx, up.idx};
  in.u = {ux, uy, up};

  in.params.points = model.points;
  in.params.masses.reserve(model.masses.size());
  for (double m : model.masses) {
    Var mv = t.leaf(m);
    tape.mass_leaves.push_back(mv.idx);
    in.params.masses.push_back(mv);
  }
  Var mm = t.leaf(model.total_mass);
  tape.total_mass_leaf = mm.idx;
  in.params.total_mass = mm;
  for (int k = 0; k < 9; ++k) {
    Var jv = t.leaf(model.inertia.m[k]);
    tape.inertia_leaf[k] = jv.idx;
    in.params.inertia.m[k] = jv;
  }
  in.params.inertia_inv = inverse(in.params.inertia);
  in.params.k_v = model.k_v;
  in.params.k_theta = model.k_theta;
  in.params.k_phi = model.k_phi;
  in.params.v_max = model.v_max;
  in.params.omega_max = model.omega_max;
  in.params.gravity = model.gravity;
  in.params.gyroscopic = gyroscopic;
  return in;
}

}  // namespace

std::pair<Rollout, RolloutTape> rollout_with_tape(
    const RigidState& s0, const HeightMap& map, const WaypointControl& u,
    const RobotModel& model, const SimConfig& cfg, ContactModelKind kind,
    bool gyroscopic) {
  model.validate();
  map.validate();
  cfg.validate();

  RolloutTape tape(cfg.max_tape_nodes);
  ad::Tape& t = tape.ops;
  TapedInputs in = make_leaves(tape, s0, u, model, gyroscopic);

  // Heightmap cells become leaves lazily, once each, on first touch.
  auto cells = [&](int ch, int i, int j) -> Var {
    auto [it, inserted] = tape.cell_leaves.try_emplace(
        CellKey{i, j}, std::array<std::int32_t, 3>{-1, -1, -1});
    auto& slot = it->second[static_cast<std::size_t>(ch)];
    if (slot < 0) {
      double value = ch == 0   ? map.h_at(i, j)
                     : ch == 1 ? map.e_at(i, j)
                                : map.d_at(i, j);
      slot = t.leaf(value).idx;
    }
    return Var(&t, slot, t.nodes()[static_cast<std::size_t>(slot)].val);
  };

  const std::size_t nsteps =
      static_cast<std::size_t>(std::floor(cfg.duration / cfg.dt + 1e-9));
  Rollout out;
  out.config = cfg;
  out.steps = nsteps;

  StateT<Var> s = in.s0;
  auto record = [&](std::size_t step, const StateT<Var>& sv) {
    double tt = static_cast<double>(step) * cfg.dt;
    RigidState rs;
    rs.x = {sv.x.x.v, sv.x.y.v, sv.x.z.v};
    rs.v = {sv.v.x.v, sv.v.y.v, sv.v.z.v};
    for (int k = 0; k < 9; ++k) rs.R.m[k] = sv.R.m[k].v;
    rs.omega = {sv.omega.x.v, sv.omega.y.v, sv.omega.z.v};
    out.trajectory.samples.push_back({tt, rs});

    std::array<std::int32_t, 18> idx;
    idx[0] = sv.x.x.idx;
    idx[1] = sv.x.y.idx;
    idx[2] = sv.x.z.idx;
    idx[3] = sv.v.x.idx;
    idx[4] = sv.v.y.idx;
    idx[5] = sv.v.z.idx;
    for (int k = 0; k < 9; ++k) idx[6 + k] = sv.R.m[k].idx;
    idx[15] = sv.omega.x.idx;
    idx[16] = sv.omega.y.idx;
    idx[17] = sv.omega.z.idx;
    tape.sample_vars.push_back(idx);
  };
  record(0, s);

  for (std::size_t step = 0; step < nsteps; ++step) {
    s = detail::euler_step_t<Var>(s, in.u, in.params, map.grid, cells, kind,
                                  cfg.dt, step, &tape.diagnostics);
    if ((step + 1) % static_cast<std::size_t>(cfg.record_stride) == 0)
      record(step + 1, s);
  }
  return {std::move(out), std::move(tape)};
}

GradientBundle backward(const RolloutTape& tape,
                        const TrajectoryGrad& upstream) {
  if (upstream.samples.size() != tape.sample_vars.size())
    throw InputError("backward: upstream gradient has " +
                     std::to_string(upstream.samples.size()) +
                     " samples, tape recorded " +
                     std::to_string(tape.sample_vars.size()));

  std::vector<std::pair<std::int32_t, double>> seeds;
  seeds.reserve(upstream.samples.size() * 18);
  for (std::size_t k = 0; k < upstream.samples.size(); ++k) {
    const auto& g = upstream.samples[k];
    const auto& idx = tape.sample_vars[k];
    const double vals[18] = {g.d_x.x,     g.d_x.y,     g.d_x.z,
                             g.d_v.x,     g.d_v.y,     g.d_v.z,
                             g.d_R.m[0],  g.d_R.m[1],  g.d_R.m[2],
                             g.d_R.m[3],  g.d_R.m[4],  g.d_R.m[5],
                             g.d_R.m[6],  g.d_R.m[7],  g.d_R.m[8],
                             g.d_omega.x, g.d_omega.y, g.d_omega.z};
    for (int c = 0; c < 18; ++c)
      if (vals[c] != 0.0) seeds.emplace_back(idx[c], vals[c]);
  }

  std::vector<double> adj = tape.ops.adjoints(seeds);
  auto at = [&](std::int32_t i) { return i >= 0 ? adj[static_cast<std::size_t>(i)] : 0.0; };

  GradientBundle out;
  out.d_x0 = {at(tape.x0[0]), at(tape.x0[1]), at(tape.x0[2])};
  out.d_v0 = {at(tape.v0[0]), at(tape.v0[1]), at(tape.v0[2])};
  out.d_omega0 = {at(tape.omega0[0]), at(tape.omega0[1]), at(tape.omega0[2])};
  for (int k = 0; k < 9; ++k) out.d_R0.m[k] = at(tape.R0[k]);
  out.d_total_mass = at(tape.total_mass_leaf);
  for (int k = 0; k < 9; ++k) out.d_inertia.m[k] = at(tape.inertia_leaf[k]);
  out.d_masses.reserve(tape.mass_leaves.size());
  for (auto i : tape.mass_leaves) out.d_masses.push_back(at(i));
  out.d_waypoint_x = at(tape.u_leaf[0]);
  out.d_waypoint_y = at(tape.u_leaf[1]);
  out.d_waypoint_phi = at(tape.u_leaf[2]);
  for (const auto& [key, leaves] : tape.cell_leaves) {
    GradientBundle::CellGrad g;
    g.h = at(leaves[0]);
    g.e = at(leaves[1]);
    g.d = at(leaves[2]);
    out.cells[key] = g;
  }
  return out;
}

std::array<double, 12> GradientBundle::s0_vector(const Mat3d& r0) const {
  std::array<double, 12> out{};
  out[0] = d_x0.x;
  out[1] = d_x0.y;
  out[2] = d_x0.z;
  out[3] = d_v0.x;
  out[4] = d_v0.y;
  out[5] = d_v0.z;
  for (int k = 0; k < 3; ++k) {
    Vec3d axis{k == 0 ? 1.0 : 0.0, k == 1 ? 1.0 : 0.0, k == 2 ? 1.0 : 0.0};
    Mat3d gen = skew(axis) * r0;
    double acc = 0;
    for (int m = 0; m < 9; ++m) acc += d_R0.m[m] * gen.m[m];
    out[6 + k] = acc;
  }
  out[9] = d_omega0.x;
  out[10] = d_omega0.y;
  out[11] = d_omega0.z;
  return out;
}

double position_loss(const Trajectory& traj, const std::vector<Vec3d>& targets,
                     TrajectoryGrad* grad_out) {
  double loss = 0;
  if (grad_out) grad_out->samples.assign(traj.samples.size(), {});
  for (std::size_t k = 0; k < traj.samples.size(); ++k) {
    Vec3d target = targets.empty() ? Vec3d{} : targets[k % targets.size()];
    Vec3d r = traj.samples[k].state.x - target;
    loss += dot(r, r);
    if (grad_out) grad_out->samples[k].d_x = 2.0 * r;
  }
  return loss;
}

namespace {

double loss_of(const GradCheckProblem& p) {
  Rollout r = simulate(p.s0, p.map, p.u, p.model, p.cfg, p.kind);
  return position_loss(r.trajectory, p.targets);
}

}  // namespace

GradCheckReport grad_check(const GradCheckProblem& problem, double eps,
                           double tolerance, double boundary_margin,
                           double clamp_margin) {
  GradCheckReport report;

  auto [rollout, tape] = rollout_with_tape(problem.s0, problem.map, problem.u,
                                           problem.model, problem.cfg,
                                           problem.kind);
  report.diagnostics = tape.diagnostics;
  if (tape.diagnostics.min_contact_margin < boundary_margin ||
      tape.diagnostics.min_speed_clamp_margin < clamp_margin ||
      tape.diagnostics.min_omega_clamp_margin < clamp_margin) {
    report.boundary_skipped = true;
    report.passed = true;
    return report;
  }

  TrajectoryGrad upstream;
  position_loss(rollout.trajectory, problem.targets, &upstream);
  GradientBundle bundle = backward(tape, upstream);

  // A central difference of the loss carries cancellation noise of order
  // eps_machine * |loss| / step, so entries whose gradient sits at or
  // below that floor cannot be compared relatively. Fold the floor into
  // the denominator (with a generous safety factor) so tiny-but-correct
  // entries are held to an absolute bar instead.
  double loss0 = position_loss(rollout.trajectory, problem.targets);
  double fd_floor = 256.0 * std::numeric_limits<double>::epsilon() *
                    std::max(1.0, std::abs(loss0)) / eps / tolerance;

  auto add_entry = [&](const std::string& name, double analytic,
                       double numeric) {
    GradCheckEntry e;
    e.name = name;
    e.analytic = analytic;
    e.numeric = numeric;
    double denom =
        std::max({std::abs(analytic), std::abs(numeric), fd_floor});
    e.rel_error = std::abs(analytic - numeric) / denom;
    if (!std::isfinite(analytic) || !std::isfinite(numeric)) {
      e.ok = false;
      e.rel_error = std::numeric_limits<double>::infinity();
    } else {
      e.ok = e.rel_error <= tolerance;
    }
    report.entries.push_back(e);
    report.max_rel_error = std::max(report.max_rel_error, e.rel_error);
  };

  auto central = [&](auto&& apply) {
    GradCheckProblem plus = problem;
    GradCheckProblem minus = problem;
    apply(plus, +1.0);
    apply(minus, -1.0);
    return (loss_of(plus) - loss_of(minus)) / 2.0;
  };

  // Terrain cells actually touched by the rollout.
  for (const auto& [key, grad] : bundle.cells) {
    const char* chname[3] = {"h", "e", "d"};
    double analytic[3] = {grad.h, grad.e, grad.d};
    for (int ch = 0; ch < 3; ++ch) {
      double base = ch == 0   ? problem.map.h_at(key.i, key.j)
                    : ch == 1 ? problem.map.e_at(key.i, key.j)
                               : problem.map.d_at(key.i, key.j);
      double step = eps * std::max(1.0, std::abs(base));
      double num = central([&](GradCheckProblem& p, double sgn) {
                     double& v = ch == 0   ? p.map.h_at(key.i, key.j)
                                 : ch == 1 ? p.map.e_at(key.i, key.j)
                                            : p.map.d_at(key.i, key.j);
                     v += sgn * step;
                   }) /
                   step;
      add_entry(std::string(chname[ch]) + "[" + std::to_string(key.i) + "," +
                    std::to_string(key.j) + "]",
                analytic[ch], num);
    }
  }

  // Point masses (total mass held fixed; the two are independent inputs).
  for (std::size_t i = 0; i < problem.model.masses.size(); ++i) {
    double base = problem.model.masses[i];
    double step = eps * std::max(1.0, std::abs(base));
    double num = central([&](GradCheckProblem& p, double sgn) {
                   p.model.masses[i] += sgn * step;
                   p.model.total_mass += sgn * step;
                 }) /
                 step;
    // FD moved both m_i and M to keep the model valid; compare against the
    // matching directional derivative.
    double analytic = bundle.d_masses[i] + bundle.d_total_mass;
    add_entry("m[" + std::to_string(i) + "]", analytic, num);
  }
  {
    double base = problem.model.total_mass;
    double step = eps * std::max(1.0, std::abs(base));
    double num = central([&](GradCheckProblem& p, double sgn) {
                   // Scale point masses along with M so validation holds;
                   // directional derivative along (M, m_1..m_n).
                   double f = (base + sgn * step) / base;
                   p.model.total_mass = base + sgn * step;
                   for (auto& m : p.model.masses) m *= f;
                 }) /
                 step;
    double analytic = bundle.d_total_mass;
    for (std::size_t i = 0; i < problem.model.masses.size(); ++i)
      analytic += bundle.d_masses[i] * problem.model.masses[i] / base;
    add_entry("M", analytic, num);
  }

  // Inertia diagonal.
  for (int k = 0; k < 3; ++k) {
    double base = problem.model.inertia(k, k);
    double step = eps * std::max(1.0, std::abs(base));
    double num = central([&](GradCheckProblem& p, double sgn) {
                   p.model.inertia(k, k) += sgn * step;
                 }) /
                 step;
    add_entry("J[" + std::to_string(k) + "," + std::to_string(k) + "]",
              bundle.d_inertia(k, k), num);
  }

  // Initial state: positions, velocities, omega, rotation tangent.
  const char* comp[3] = {"x", "y", "z"};
  for (int k = 0; k < 3; ++k) {
    double step = eps;
    double num = central([&](GradCheckProblem& p, double sgn) {
                   p.s0.x[k] += sgn * step;
                 }) /
                 step;
    add_entry(std::string("s0.x.") + comp[k], bundle.d_x0[k], num);
  }
  for (int k = 0; k < 3; ++k) {
    double step = eps;
    double num = central([&](GradCheckProblem& p, double sgn) {
                   p.s0.v[k] += sgn * step;
                 }) /
                 step;
    add_entry(std::string("s0.v.") + comp[k], bundle.d_v0[k], num);
  }
  for (int k = 0; k < 3; ++k) {
    double step = eps;
    double num = central([&](GradCheckProblem& p, double sgn) {
                   p.s0.omega[k] += sgn * step;
                 }) /
                 step;
    add_entry(std::string("s0.omega.") + comp[k], bundle.d_omega0[k], num);
  }
  {
    std::array<double, 12> tangent = bundle.s0_vector(problem.s0.R);
    for (int k = 0; k < 3; ++k) {
      double step = eps;
      double num = central([&](GradCheckProblem& p, double sgn) {
                     Vec3d axis{};
                     axis[k] = sgn * step;
                     p.s0.R = rot_axis_angle(axis) * p.s0.R;
                   }) /
                   step;
      add_entry(std::string("s0.R.") + comp[k], tangent[6 + k], num);
    }
  }

  // Waypoint.
  {
    double* analytic[3] = {&bundle.d_waypoint_x, &bundle.d_waypoint_y,
                           &bundle.d_waypoint_phi};
    const char* names[3] = {"u.x_g", "u.y_g", "u.phi_g"};
    for (int k = 0; k < 3; ++k) {
      double step = eps;
      double num = central([&](GradCheckProblem& p, double sgn) {
                     double* fields[3] = {&p.u.x_g, &p.u.y_g, &p.u.phi_g};
                     *fields[k] += sgn * step;
                   }) /
                   step;
      add_entry(names[k], *analytic[k], num);
    }
  }

  report.passed = true;
  for (const auto& e : report.entries)
    if (!e.ok) report.passed = false;
  return report;
}

}  // namespace terradyn
