// Copyright 2026 The readv Authors.
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

#include "readv/plot.h"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>

namespace readv {
namespace {

constexpr int kCell = 56;
constexpr int kCharWidth = 7;

std::string escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

// White to dark blue.
std::string colour(double t) {
  t = std::clamp(t, 0.0, 1.0);
  auto mix = [t](int a, int b) {
    return static_cast<int>(std::lround(a + (b - a) * t));
  };
  return fmt::format("#{:02x}{:02x}{:02x}", mix(247, 8), mix(251, 48),
                     mix(255, 107));
}

std::size_t longest(const std::vector<std::string>& labels) {
  std::size_t n = 0;
  for (const auto& l : labels) n = std::max(n, l.size());
  return n;
}

}  // namespace

std::string heatmap_svg(const Heatmap& map) {
  double lo = map.min_value.value_or(INFINITY);
  double hi = map.max_value.value_or(-INFINITY);
  for (const auto& row : map.values) {
    for (const auto& v : row) {
      if (!v) continue;
      if (!map.min_value) lo = std::min(lo, *v);
      if (!map.max_value) hi = std::max(hi, *v);
    }
  }
  if (!std::isfinite(lo) || !std::isfinite(hi)) lo = 0.0, hi = 1.0;
  const double span = hi > lo ? hi - lo : 1.0;

  const int left = static_cast<int>(longest(map.row_labels)) * kCharWidth + 16;
  const int top = static_cast<int>(longest(map.col_labels)) * kCharWidth + 40;
  const int cols = static_cast<int>(map.col_labels.size());
  const int rows = static_cast<int>(map.row_labels.size());
  const int width = left + cols * kCell + 16;
  const int height = top + rows * kCell + 16;

  std::string svg = fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" "
      "font-family=\"sans-serif\" font-size=\"11\">\n",
      width, height);
  svg += "<defs><pattern id=\"na\" width=\"6\" height=\"6\" "
         "patternUnits=\"userSpaceOnUse\"><rect width=\"6\" height=\"6\" "
         "fill=\"#ddd\"/><path d=\"M0,6 L6,0\" stroke=\"#aaa\"/></pattern>"
         "</defs>\n";
  svg += fmt::format("<text x=\"8\" y=\"18\" font-size=\"14\">{}</text>\n",
                     escape(map.title));
  for (int c = 0; c < cols; ++c) {
    const int x = left + c * kCell + kCell / 2;
    svg += fmt::format(
        "<text transform=\"translate({},{}) rotate(-60)\">{}</text>\n", x,
        top - 6, escape(map.col_labels[c]));
  }
  for (int r = 0; r < rows; ++r) {
    const int y = top + r * kCell;
    svg += fmt::format(
        "<text x=\"{}\" y=\"{}\" text-anchor=\"end\">{}</text>\n", left - 6,
        y + kCell / 2 + 4, escape(map.row_labels[r]));
    for (int c = 0; c < cols; ++c) {
      const int x = left + c * kCell;
      const auto& v = map.values[r][c];
      if (!v) {
        svg += fmt::format("<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" "
                           "fill=\"url(#na)\"/>\n",
                           x, y, kCell, kCell);
        continue;
      }
      const double t = (*v - lo) / span;
      svg += fmt::format("<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" "
                         "fill=\"{}\" stroke=\"#fff\"/>\n",
                         x, y, kCell, kCell, colour(t));
      svg += fmt::format(
          "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\" fill=\"{}\">"
          "{:.{}f}</text>\n",
          x + kCell / 2, y + kCell / 2 + 4, t > 0.55 ? "#fff" : "#000", *v,
          map.decimals);
    }
  }
  svg += "</svg>\n";
  return svg;
}

}  // namespace readv
