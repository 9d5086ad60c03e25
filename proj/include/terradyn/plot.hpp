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

// Deterministic SVG line plots and PGM heightmap renders.

#ifndef TERRADYN_PLOT_HPP_
#define TERRADYN_PLOT_HPP_

#include <string>
#include <vector>

#include "terradyn/terrain.hpp"

namespace terradyn {

struct Series {
  std::string label;
  std::string color = "#d62728";
  std::vector<double> x;
  std::vector<double> y;
};

// Line plot; identical inputs produce identical bytes.
std::string svg_line_plot(const std::vector<Series>& series,
                          const std::string& x_label,
                          const std::string& y_label, int width = 640,
                          int height = 480);

// ASCII PGM (P2) with min(h) -> 0 and max(h) -> 255.
std::string heightmap_to_pgm(const HeightMap& map);

}  // namespace terradyn

#endif  // TERRADYN_PLOT_HPP_
