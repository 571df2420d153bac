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

// Minimal SVG heatmaps for the analysis reports.

#ifndef READV_PLOT_H_
#define READV_PLOT_H_

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace readv {

struct Heatmap {
  std::string title;
  std::vector<std::string> row_labels;
  std::vector<std::string> col_labels;
  // Row-major; absent cells are drawn hatched grey.
  std::vector<std::vector<std::optional<double>>> values;
  // Colour scale bounds; taken from the data when unset.
  std::optional<double> min_value;
  std::optional<double> max_value;
  int decimals = 2;
};

std::string heatmap_svg(const Heatmap& map);

}  // namespace readv

#endif  // READV_PLOT_H_
