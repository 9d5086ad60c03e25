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

#include "terradyn/terrain.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace terradyn {

void HeightMap::validate() const {
  grid.validate();
  std::size_t n = static_cast<std::size_t>(grid.nx) * grid.ny;
  if (h.size() != n || e.size() != n || d.size() != n)
    throw InputError("HeightMap: channel size does not match grid");
  for (std::size_t k = 0; k < n; ++k) {
    if (!std::isfinite(h[k]) || !std::isfinite(e[k]) || !std::isfinite(d[k]))
      throw InputError("HeightMap: non-finite channel value");
    if (e[k] < 0 || d[k] < 0)
      throw InputError("HeightMap: elasticity and damping must be >= 0");
  }
}

TerrainSample sample(const HeightMap& map, double x, double y) {
  map.validate();
  return detail::sample_impl<double>(map.grid, map_channel_accessor(map), x, y,
                                     true);
}

BilinearWeights sample_gradient(const HeightMap& map, double x, double y) {
  map.validate();
  detail::CellLocator loc = detail::locate_cell(map.grid, x, y);
  BilinearWeights out;
  out.in_bounds = loc.in_bounds;
  out.i0 = loc.i0;
  out.j0 = loc.j0;
  if (!loc.in_bounds) return out;
  double u = std::clamp(loc.gx - loc.i0, 0.0, 1.0);
  double v = std::clamp(loc.gy - loc.j0, 0.0, 1.0);
  out.w = {(1 - u) * (1 - v), u * (1 - v), (1 - u) * v, u * v};
  return out;
}

HeightMap cloud_to_heightmap(const std::vector<Vec3d>& points,
                             const GridSpec& grid, double default_e,
                             double default_d, int knn) {
  grid.validate();
  HeightMap out(grid, 0.0, default_e, default_d);

  std::vector<std::vector<double>> bins(static_cast<std::size_t>(grid.nx) *
                                        grid.ny);
  for (const Vec3d& p : points) {
    double gx = (p.x - grid.origin_x) / grid.resolution;
    double gy = (p.y - grid.origin_y) / grid.resolution;
    int i = static_cast<int>(std::floor(gx + 0.5));
    int j = static_cast<int>(std::floor(gy + 0.5));
    if (i < 0 || i >= grid.nx || j < 0 || j >= grid.ny) continue;
    bins[out.index(i, j)].push_back(p.z);
  }

  struct Occupied {
    int i, j;
    double z;
  };
  std::vector<Occupied> occupied;
  for (int i = 0; i < grid.nx; ++i) {
    for (int j = 0; j < grid.ny; ++j) {
      auto& b = bins[out.index(i, j)];
      if (b.empty()) continue;
      // Sort before summing so the result is independent of input order.
      std::sort(b.begin(), b.end());
      double mean = std::accumulate(b.begin(), b.end(), 0.0) /
                    static_cast<double>(b.size());
      out.h_at(i, j) = mean;
      occupied.push_back({i, j, mean});
    }
  }
  if (occupied.empty())
    throw InputError("cloud_to_heightmap: no points inside the grid");

  // Fill holes by inverse-distance weighting from the k nearest occupied
  // cells (cell-center metric).
  for (int i = 0; i < grid.nx; ++i) {
    for (int j = 0; j < grid.ny; ++j) {
      if (!bins[out.index(i, j)].empty()) continue;
      struct Cand {
        double d2;
        int i, j;
        double z;
      };
      std::vector<Cand> cands;
      cands.reserve(occupied.size());
      for (const auto& o : occupied) {
        double dx = static_cast<double>(o.i - i);
        double dy = static_cast<double>(o.j - j);
        cands.push_back({dx * dx + dy * dy, o.i, o.j, o.z});
      }
      std::size_t k =
          std::min<std::size_t>(static_cast<std::size_t>(knn), cands.size());
      std::partial_sort(cands.begin(), cands.begin() + k, cands.end(),
                        [](const Cand& a, const Cand& b) {
                          return std::tie(a.d2, a.i, a.j) <
                                 std::tie(b.d2, b.i, b.j);
                        });
      double wsum = 0, zsum = 0;
      for (std::size_t c = 0; c < k; ++c) {
        double w = 1.0 / cands[c].d2;
        wsum += w;
        zsum += w * cands[c].z;
      }
      out.h_at(i, j) = zsum / wsum;
    }
  }
  return out;
}

}  // namespace terradyn
