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

// File formats: heightmap CSV, trajectory CSV (quaternion rows), robot
// model JSON, xyz point clouds, run manifests. All numeric text is full
// double precision and round-trips bit-exactly.

#ifndef TERRADYN_IO_HPP_
#define TERRADYN_IO_HPP_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "terradyn/core.hpp"
#include "terradyn/terrain.hpp"

namespace terradyn {

std::string format_double(double v);  // %.17g

// Heightmap CSV: header `nx,ny,resolution,origin_x,origin_y`, then
// nx*ny rows `i,j,h,e,d` in row-major order.
std::string heightmap_to_csv(const HeightMap& map);
HeightMap heightmap_from_csv(const std::string& text);
void save_heightmap(const HeightMap& map, const std::filesystem::path& path);
HeightMap load_heightmap(const std::filesystem::path& path);

// Trajectory CSV: header `t,x,y,z,qw,qx,qy,qz,vx,vy,vz,wx,wy,wz`;
// rotations as unit quaternions with qw >= 0.
std::string trajectory_to_csv(const Trajectory& traj);
Trajectory trajectory_from_csv(const std::string& text);
void save_trajectory(const Trajectory& traj, const std::filesystem::path& path);
Trajectory load_trajectory(const std::filesystem::path& path);

struct Quaternion {
  double w = 1, x = 0, y = 0, z = 0;
};
Quaternion quat_from_matrix(const Mat3d& r);
Mat3d matrix_from_quat(const Quaternion& q);

// Robot model JSON: {points, masses, inertia, gains{kv,ktheta,kphi},
// limits{v_max,omega_max}, gravity}.
RobotModel robot_from_json(const std::string& text);
std::string robot_to_json(const RobotModel& model);
RobotModel load_robot(const std::filesystem::path& path);
void save_robot(const RobotModel& model, const std::filesystem::path& path);

// Plain text point cloud, one `x y z` per line.
std::vector<Vec3d> load_cloud(const std::filesystem::path& path);
void save_cloud(const std::vector<Vec3d>& points,
                const std::filesystem::path& path);

std::string read_file(const std::filesystem::path& path);
// Write via a temp file + rename.
void write_file_atomic(const std::filesystem::path& path,
                       const std::string& content);

std::uint64_t fnv1a_digest(const std::string& content);

// Provenance sidecar written next to every CLI output.
struct RunManifest {
  std::string command;
  std::string config_json;
  std::vector<std::pair<std::string, std::string>> input_digests;
  std::vector<std::string> outputs;
  double wall_seconds = 0;
  std::string version = "0.1.0";
};
void write_manifest(const RunManifest& m, const std::filesystem::path& path);

}  // namespace terradyn

#endif  // TERRADYN_IO_HPP_
