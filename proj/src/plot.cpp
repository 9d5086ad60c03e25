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

#include "terradyn/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace terradyn {

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.3f", v);
  return buf;
}

}  // namespace

std::string svg_line_plot(const std::vector<Series>& series,
                          const std::string& x_label,
                          const std::string& y_label, int width, int height) {
  double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
  for (const auto& s : series) {
    if (s.x.size() != s.y.size())
      throw InputError("svg_line_plot: series '" + s.label +
                       "' has mismatched x/y lengths");
    for (double v : s.x) {
      xmin = std::min(xmin, v);
      xmax = std::max(xmax, v);
    }
    for (double v : s.y) {
      ymin = std::min(ymin, v);
      ymax = std::max(ymax, v);
    }
  }
  if (xmin > xmax) {
    xmin = 0;
    xmax = 1;
    ymin = 0;
    ymax = 1;
  }
  if (xmax == xmin) xmax = xmin + 1;
  if (ymax == ymin) ymax = ymin + 1;

  const double ml = 60, mr = 20, mt = 20, mb = 50;
  const double pw = width - ml - mr, ph = height - mt - mb;
  auto px = [&](double x) { return ml + (x - xmin) / (xmax - xmin) * pw; };
  auto py = [&](double y) { return mt + ph - (y - ymin) / (ymax - ymin) * ph; };

  std::string out;
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" +
         std::to_string(width) + "\" height=\"" + std::to_string(height) +
         "\">\n";
  out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out += "<rect x=\"" + fmt(ml) + "\" y=\"" + fmt(mt) + "\" width=\"" +
         fmt(pw) + "\" height=\"" + fmt(ph) +
         "\" fill=\"none\" stroke=\"#333333\"/>\n";
  for (const auto& s : series) {
    if (s.x.empty()) continue;
    out += "<polyline fill=\"none\" stroke=\"" + s.color +
           "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t k = 0; k < s.x.size(); ++k) {
      if (k) out += " ";
      out += fmt(px(s.x[k])) + "," + fmt(py(s.y[k]));
    }
    out += "\"/>\n";
  }
  double ly = mt + 16;
  for (const auto& s : series) {
    out += "<text x=\"" + fmt(ml + 8) + "\" y=\"" + fmt(ly) + "\" fill=\"" +
           s.color + "\" font-size=\"12\" font-family=\"sans-serif\">" +
           s.label + "</text>\n";
    ly += 16;
  }
  out += "<text x=\"" + fmt(ml + pw / 2) + "\" y=\"" + fmt(height - 12) +
         "\" text-anchor=\"middle\" font-size=\"13\" "
         "font-family=\"sans-serif\">" +
         x_label + "</text>\n";
  out += "<text x=\"16\" y=\"" + fmt(mt + ph / 2) +
         "\" transform=\"rotate(-90 16 " + fmt(mt + ph / 2) +
         ")\" text-anchor=\"middle\" font-size=\"13\" "
         "font-family=\"sans-serif\">" +
         y_label + "</text>\n";
  // Axis range annotations keep the plot readable without tick logic.
  out += "<text x=\"" + fmt(ml) + "\" y=\"" + fmt(height - 30) +
         "\" font-size=\"11\" font-family=\"sans-serif\">" + fmt(xmin) +
         "</text>\n";
  out += "<text x=\"" + fmt(ml + pw) + "\" y=\"" + fmt(height - 30) +
         "\" text-anchor=\"end\" font-size=\"11\" "
         "font-family=\"sans-serif\">" +
         fmt(xmax) + "</text>\n";
  out += "<text x=\"" + fmt(ml - 6) + "\" y=\"" + fmt(mt + ph) +
         "\" text-anchor=\"end\" font-size=\"11\" "
         "font-family=\"sans-serif\">" +
         fmt(ymin) + "</text>\n";
  out += "<text x=\"" + fmt(ml - 6) + "\" y=\"" + fmt(mt + 10) +
         "\" text-anchor=\"end\" font-size=\"11\" "
         "font-family=\"sans-serif\">" +
         fmt(ymax) + "</text>\n";
  out += "</svg>\n";
  return out;
}

std::string heightmap_to_pgm(const HeightMap& map) {
  map.validate();
  double hmin = *std::min_element(map.h.begin(), map.h.end());
  double hmax = *std::max_element(map.h.begin(), map.h.end());
  double scale = hmax > hmin ? 255.0 / (hmax - hmin) : 0.0;
  std::string out = "P2\n" + std::to_string(map.grid.nx) + " " +
                    std::to_string(map.grid.ny) + "\n255\n";
  // Row j printed top-to-bottom so +y points up in the image.
  for (int j = map.grid.ny - 1; j >= 0; --j) {
    for (int i = 0; i < map.grid.nx; ++i) {
      int v = static_cast<int>(std::lround((map.h_at(i, j) - hmin) * scale));
      v = std::clamp(v, 0, 255);
      if (i) out += " ";
      out += std::to_string(v);
    }
    out += "\n";
  }
  return out;
}

}  // namespace terradyn
