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

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "terradyn/eval.hpp"
#include "terradyn/io.hpp"
#include "terradyn/optim.hpp"
#include "terradyn/scenarios.hpp"

namespace py = pybind11;
using namespace terradyn;

namespace {

Vec3d to_vec3(const std::array<double, 3>& a) { return {a[0], a[1], a[2]}; }
std::array<double, 3> from_vec3(const Vec3d& v) { return {v.x, v.y, v.z}; }

Mat3d to_mat3(const std::array<std::array<double, 3>, 3>& rows) {
  Mat3d m;
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) m(r, c) = rows[r][c];
  return m;
}

std::array<std::array<double, 3>, 3> from_mat3(const Mat3d& m) {
  std::array<std::array<double, 3>, 3> rows;
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) rows[r][c] = m(r, c);
  return rows;
}

}  // namespace

PYBIND11_MODULE(_core, mod) {
  mod.doc() = "Differentiable rigid-body/terrain interaction engine";

  py::register_exception<InputError>(mod, "InputError", PyExc_ValueError);
  py::register_exception<NumericalError>(mod, "NumericalError",
                                         PyExc_ArithmeticError);

  py::class_<GridSpec>(mod, "GridSpec")
      .def(py::init<>())
      .def_readwrite("nx", &GridSpec::nx)
      .def_readwrite("ny", &GridSpec::ny)
      .def_readwrite("resolution", &GridSpec::resolution)
      .def_readwrite("origin_x", &GridSpec::origin_x)
      .def_readwrite("origin_y", &GridSpec::origin_y);

  py::class_<HeightMap>(mod, "HeightMap")
      .def(py::init<>())
      .def(py::init<GridSpec, double, double, double>(), py::arg("grid"),
           py::arg("h0") = 0.0, py::arg("e0") = 1000.0, py::arg("d0") = 50.0)
      .def_readwrite("grid", &HeightMap::grid)
      .def_readwrite("h", &HeightMap::h)
      .def_readwrite("e", &HeightMap::e)
      .def_readwrite("d", &HeightMap::d)
      .def("index", &HeightMap::index);

  py::class_<TerrainSample>(mod, "TerrainSample")
      .def_readonly("h", &TerrainSample::h)
      .def_readonly("e", &TerrainSample::e)
      .def_readonly("d", &TerrainSample::d)
      .def_property_readonly(
          "n", [](const TerrainSample& s) { return from_vec3(s.n); })
      .def_readonly("in_bounds", &TerrainSample::in_bounds);

  py::class_<RigidState>(mod, "RigidState")
      .def(py::init<>())
      .def_property(
          "x", [](const RigidState& s) { return from_vec3(s.x); },
          [](RigidState& s, const std::array<double, 3>& v) {
            s.x = to_vec3(v);
          })
      .def_property(
          "v", [](const RigidState& s) { return from_vec3(s.v); },
          [](RigidState& s, const std::array<double, 3>& v) {
            s.v = to_vec3(v);
          })
      .def_property(
          "omega", [](const RigidState& s) { return from_vec3(s.omega); },
          [](RigidState& s, const std::array<double, 3>& v) {
            s.omega = to_vec3(v);
          })
      .def_property(
          "R", [](const RigidState& s) { return from_mat3(s.R); },
          [](RigidState& s, const std::array<std::array<double, 3>, 3>& m) {
            s.R = to_mat3(m);
          });

  py::class_<WaypointControl>(mod, "WaypointControl")
      .def(py::init<>())
      .def(py::init([](double x, double y, double phi) {
             return WaypointControl{x, y, phi};
           }),
           py::arg("x"), py::arg("y"), py::arg("phi"))
      .def_readwrite("x", &WaypointControl::x_g)
      .def_readwrite("y", &WaypointControl::y_g)
      .def_readwrite("phi", &WaypointControl::phi_g);

  py::class_<RobotModel>(mod, "RobotModel")
      .def(py::init<>())
      .def_property(
          "points",
          [](const RobotModel& m) {
            std::vector<std::array<double, 3>> out;
            for (const auto& p : m.points) out.push_back(from_vec3(p));
            return out;
          },
          [](RobotModel& m, const std::vector<std::array<double, 3>>& pts) {
            m.points.clear();
            for (const auto& p : pts) m.points.push_back(to_vec3(p));
          })
      .def_readwrite("masses", &RobotModel::masses)
      .def_readwrite("total_mass", &RobotModel::total_mass)
      .def_property(
          "inertia", [](const RobotModel& m) { return from_mat3(m.inertia); },
          [](RobotModel& m, const std::array<std::array<double, 3>, 3>& j) {
            m.inertia = to_mat3(j);
          })
      .def_readwrite("k_v", &RobotModel::k_v)
      .def_readwrite("k_theta", &RobotModel::k_theta)
      .def_readwrite("k_phi", &RobotModel::k_phi)
      .def_readwrite("v_max", &RobotModel::v_max)
      .def_readwrite("omega_max", &RobotModel::omega_max)
      .def_readwrite("gravity", &RobotModel::gravity)
      .def("validate", &RobotModel::validate);

  py::class_<SimConfig>(mod, "SimConfig")
      .def(py::init<>())
      .def_readwrite("dt", &SimConfig::dt)
      .def_readwrite("duration", &SimConfig::duration)
      .def_readwrite("record_stride", &SimConfig::record_stride);

  py::class_<TrajectorySample>(mod, "TrajectorySample")
      .def(py::init<>())
      .def_readwrite("t", &TrajectorySample::t)
      .def_readwrite("state", &TrajectorySample::state);

  py::class_<Trajectory>(mod, "Trajectory")
      .def(py::init<>())
      .def_readwrite("samples", &Trajectory::samples)
      .def("validate", &Trajectory::validate);

  py::enum_<ContactModelKind>(mod, "ContactModel")
      .value("vertical", ContactModelKind::kVertical)
      .value("normal", ContactModelKind::kNormal);

  py::class_<Rollout>(mod, "Rollout")
      .def_readonly("trajectory", &Rollout::trajectory)
      .def_readonly("steps", &Rollout::steps);

  py::class_<TrackingReport>(mod, "TrackingReport")
      .def_readonly("delta_x", &TrackingReport::delta_x)
      .def_readonly("delta_R_deg", &TrackingReport::delta_R_deg)
      .def_readonly("n", &TrackingReport::n);

  py::class_<OptimHyper>(mod, "OptimHyper")
      .def(py::init<>())
      .def_readwrite("learning_rate", &OptimHyper::learning_rate)
      .def_readwrite("iterations", &OptimHyper::iterations)
      .def_readwrite("chunk_duration", &OptimHyper::chunk_duration)
      .def_readwrite("contact", &OptimHyper::contact);

  py::class_<OptimReport>(mod, "OptimReport")
      .def_readonly("loss_curve", &OptimReport::loss_curve)
      .def_readonly("final_map", &OptimReport::final_map)
      .def_readonly("converged", &OptimReport::converged);

  py::class_<GradCheckReport>(mod, "GradCheckReport")
      .def_readonly("max_rel_error", &GradCheckReport::max_rel_error)
      .def_readonly("passed", &GradCheckReport::passed)
      .def_readonly("boundary_skipped", &GradCheckReport::boundary_skipped);

  py::class_<Scenario>(mod, "Scenario")
      .def_readonly("name", &Scenario::name)
      .def_readonly("robot", &Scenario::robot)
      .def_readonly("map", &Scenario::map)
      .def_readonly("s0", &Scenario::s0)
      .def_readonly("waypoint", &Scenario::waypoint)
      .def_readonly("config", &Scenario::cfg)
      .def_readonly("contact", &Scenario::contact);

  mod.def("simulate", &simulate, py::arg("s0"), py::arg("map"), py::arg("u"),
          py::arg("model"), py::arg("config"),
          py::arg("contact") = ContactModelKind::kVertical,
          py::arg("record_forces") = false, py::arg("gyroscopic") = false);
  mod.def(
      "sample_at",
      [](const Trajectory& t, double time) { return sample_at(t, time); },
      py::arg("trajectory"), py::arg("t"));
  mod.def("sample", &sample, py::arg("map"), py::arg("x"), py::arg("y"));
  mod.def(
      "cloud_to_heightmap",
      [](const std::vector<std::array<double, 3>>& pts, const GridSpec& grid,
         double e0, double d0) {
        std::vector<Vec3d> cloud;
        for (const auto& p : pts) cloud.push_back(to_vec3(p));
        return cloud_to_heightmap(cloud, grid, e0, d0);
      },
      py::arg("points"), py::arg("grid"), py::arg("default_e") = 1000.0,
      py::arg("default_d") = 50.0);
  mod.def("optimize_terrain", &optimize_terrain, py::arg("gt"),
          py::arg("initial"), py::arg("model"), py::arg("config"),
          py::arg("hyper"));
  mod.def("flat_initial_map", &flat_initial_map, py::arg("gt"),
          py::arg("model"), py::arg("resolution") = 0.2,
          py::arg("margin") = 1.0, py::arg("e0") = 1000.0,
          py::arg("d0") = 50.0);
  mod.def("tracking_errors", &tracking_errors, py::arg("pred"), py::arg("gt"));
  mod.def("mechanical_energy", &mechanical_energy, py::arg("state"),
          py::arg("model"), py::arg("map"), py::arg("contact"));
  mod.def("make_scenario", &make_scenario, py::arg("name"),
          py::arg("seed") = 0u);
  mod.def("scenario_names", &scenario_names);
  mod.def("default_robot", &default_robot);
  mod.def(
      "grad_check_random",
      [](unsigned seed, double eps, double tol) {
        return grad_check(random_smooth_problem(seed), eps, tol);
      },
      py::arg("seed"), py::arg("eps") = 1e-5, py::arg("tol") = 1e-4);
  mod.def("save_trajectory", &save_trajectory);
  mod.def("load_trajectory", &load_trajectory);
  mod.def("save_heightmap", &save_heightmap);
  mod.def("load_heightmap", &load_heightmap);
  mod.def("trajectory_to_csv", &trajectory_to_csv);
  mod.def("trajectory_from_csv", &trajectory_from_csv);
  mod.def("heightmap_to_csv", &heightmap_to_csv);
  mod.def("heightmap_from_csv", &heightmap_from_csv);
}
