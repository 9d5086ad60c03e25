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

#ifndef TERRADYN_TERRAIN_HPP_
#define TERRADYN_TERRAIN_HPP_

#include <cmath>
#include <cstdint>
#include <vector>

#include "terradyn/core.hpp"
#include "terradyn/tape.hpp"
#include "terradyn/vecmat.hpp"

namespace terradyn {

struct GridSpec {
  int nx = 2;
  int ny = 2;
  double resolution = 0.1;
  double origin_x = 0;
  double origin_y = 0;

  void validate() const {
    if (nx < 2 || ny < 2) throw InputError("GridSpec: nx and ny must be >= 2");
    if (!(resolution > 0)) throw InputError("GridSpec: resolution must be > 0");
    if (!std::isfinite(origin_x) || !std::isfinite(origin_y))
      throw InputError("GridSpec: origin must be finite");
  }
  bool operator==(const GridSpec&) const = default;
};

// Regular grid with three channels: supporting height h [m], elasticity e
// [N/m per contact point] and damping d [N·s/m per contact point].
// Cell (i, j) center sits at (origin_x + i*res, origin_y + j*res).
struct HeightMap {
  GridSpec grid;
  std::vector<double> h;
  std::vector<double> e;
  std::vector<double> d;

  HeightMap() = default;
  HeightMap(GridSpec g, double h0 = 0.0, double e0 = 1000.0, double d0 = 50.0)
      : grid(g) {
    g.validate();
    std::size_t n = static_cast<std::size_t>(g.nx) * g.ny;
    h.assign(n, h0);
    e.assign(n, e0);
    d.assign(n, d0);
  }

  std::size_t index(int i, int j) const {
    return static_cast<std::size_t>(i) * grid.ny + j;
  }
  double& h_at(int i, int j) { return h[index(i, j)]; }
  double& e_at(int i, int j) { return e[index(i, j)]; }
  double& d_at(int i, int j) { return d[index(i, j)]; }
  double h_at(int i, int j) const { return h[index(i, j)]; }
  double e_at(int i, int j) const { return e[index(i, j)]; }
  double d_at(int i, int j) const { return d[index(i, j)]; }

  void validate() const;
};

template <class T>
struct TerrainSampleT {
  T h{};
  T e{};
  T d{};
  Vec3<T> n{T(0), T(0), T(1)};
  // False when the query fell beyond the half-cell margin around the grid;
  // no terrain force applies there.
  bool in_bounds = true;
};

using TerrainSample = TerrainSampleT<double>;

// Bilinear footprint of a query point: the four surrounding cells and
// their interpolation weights, ordered (SW, SE, NW, NE).
struct BilinearWeights {
  int i0 = 0;
  int j0 = 0;
  std::array<double, 4> w{};
  bool in_bounds = true;
};

namespace detail {

inline double value_of_any(double x) { return x; }
inline double value_of_any(const ad::Var& x) { return x.v; }

// Cell coordinates and support corner for a world-space query, including
// the clamping policy: queries beyond a half-cell margin are out of
// bounds; inside the margin they clamp to the border patch.
struct CellLocator {
  int i0, j0;
  double gx, gy;  // continuous cell coordinates
  bool in_bounds;
};

inline CellLocator locate_cell(const GridSpec& g, double x, double y) {
  CellLocator loc;
  loc.gx = (x - g.origin_x) / g.resolution;
  loc.gy = (y - g.origin_y) / g.resolution;
  loc.in_bounds = loc.gx >= -0.5 && loc.gx <= g.nx - 0.5 && loc.gy >= -0.5 &&
                  loc.gy <= g.ny - 0.5;
  loc.i0 = std::clamp(static_cast<int>(std::floor(loc.gx)), 0, g.nx - 2);
  loc.j0 = std::clamp(static_cast<int>(std::floor(loc.gy)), 0, g.ny - 2);
  return loc;
}

// Channel-generic bilinear sampler. `cells` maps (channel, i, j) to a
// scalar of type T; channel 0/1/2 = h/e/d. Positions are type T so the
// sample is differentiable w.r.t. the query point as well.
template <class T, class Cells>
TerrainSampleT<T> sample_impl(const GridSpec& g, Cells&& cells, const T& x,
                              const T& y, bool want_normal) {
  using scalar::smax_c;
  using scalar::smin_c;
  CellLocator loc = locate_cell(g, value_of_any(x), value_of_any(y));
  TerrainSampleT<T> out;
  out.in_bounds = loc.in_bounds;
  if (!loc.in_bounds) return out;

  T gx = (x - g.origin_x) / g.resolution;
  T gy = (y - g.origin_y) / g.resolution;
  T u = smax_c(smin_c(gx - static_cast<double>(loc.i0), 1.0), 0.0);
  T v = smax_c(smin_c(gy - static_cast<double>(loc.j0), 1.0), 0.0);

  const int i0 = loc.i0, j0 = loc.j0;
  for (int ch = 0; ch < 3; ++ch) {
    T c00 = cells(ch, i0, j0);
    T c10 = cells(ch, i0 + 1, j0);
    T c01 = cells(ch, i0, j0 + 1);
    T c11 = cells(ch, i0 + 1, j0 + 1);
    T val = (1.0 - u) * (1.0 - v) * c00 + u * (1.0 - v) * c10 +
            (1.0 - u) * v * c01 + u * v * c11;
    if (ch == 0) out.h = val;
    if (ch == 1) out.e = val;
    if (ch == 2) out.d = val;
  }
  if (want_normal) {
    T h00 = cells(0, i0, j0);
    T h10 = cells(0, i0 + 1, j0);
    T h01 = cells(0, i0, j0 + 1);
    T h11 = cells(0, i0 + 1, j0 + 1);
    T dhdx = ((h10 - h00) * (1.0 - v) + (h11 - h01) * v) / g.resolution;
    T dhdy = ((h01 - h00) * (1.0 - u) + (h11 - h10) * u) / g.resolution;
    out.n = normalized(Vec3<T>{-dhdx, -dhdy, T(1)});
  }
  return out;
}

}  // namespace detail

// Channel accessor over a HeightMap for the generic sampler.
inline auto map_channel_accessor(const HeightMap& map) {
  return [&map](int ch, int i, int j) -> double {
    return ch == 0 ? map.h_at(i, j) : ch == 1 ? map.e_at(i, j) : map.d_at(i, j);
  };
}

// Bilinear interpolation of all three channels plus the analytic surface
// normal of the bilinear height patch.
TerrainSample sample(const HeightMap& map, double x, double y);

// The four bilinear weights identifying how each surrounding cell
// contributes to a sample at (x, y); shared by all three channels.
BilinearWeights sample_gradient(const HeightMap& map, double x, double y);

// Grid a point cloud into a height channel: per-cell mean z, with empty
// cells filled by inverse-distance weighting from the k nearest occupied
// cells. e and d are filled with the given defaults.
HeightMap cloud_to_heightmap(const std::vector<Vec3d>& points,
                             const GridSpec& grid, double default_e = 1000.0,
                             double default_d = 50.0, int knn = 8);

}  // namespace terradyn

#endif  // TERRADYN_TERRAIN_HPP_
