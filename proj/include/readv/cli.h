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

// Pipeline entry points behind the `readv` command.
//
// File naming is the join key between stages and external model harnesses:
//   <out>/std.json                    corpus the datasets were generated from
//   <out>/adv_<strategy>_<target>.json
//   <out>/provenance_<strategy>_<target>.jsonl
//   <out>/skip_log.jsonl, <out>/manifest.json
//   <preds>/pred_std.jsonl, <preds>/pred_<strategy>_<target>.jsonl

#ifndef READV_CLI_H_
#define READV_CLI_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "readv/analysis.h"
#include "readv/substitution.h"

namespace readv {

inline constexpr std::string_view kToolVersion = "0.3.0";

struct AnalysisToggles {
  bool drift = false;
  bool adherence = false;
  bool flow = false;
  bool jaccard = false;
  bool critical = false;

  bool any() const { return drift || adherence || flow || jaccard || critical; }
};

struct RunConfig {
  std::optional<std::filesystem::path> data;
  std::optional<std::filesystem::path> links;
  std::optional<std::filesystem::path> train;
  std::optional<std::filesystem::path> donors;
  std::optional<std::filesystem::path> donor_links;
  std::optional<std::filesystem::path> preds_dir;
  std::filesystem::path out_dir = ".";
  // Where score/analyze read generated datasets; defaults to out_dir.
  std::optional<std::filesystem::path> gold_dir;
  std::optional<std::filesystem::path> manifest;
  std::optional<std::filesystem::path> confusable_sets;
  // "tacred", "inferred", or a JSON file holding an array of labels.
  std::string labels = "tacred";
  std::optional<std::uint64_t> seed;
  OnEmpty on_empty = OnEmpty::kSkip;
  std::vector<Strategy> strategies;  // empty: all
  std::vector<Target> targets;       // empty: all
  unsigned threads = 1;
  AnalysisToggles analyses;
  AdherenceOptions adherence;
  JaccardMode jaccard_mode = JaccardMode::kRelationAggregate;
  std::string model_name = "model";
};

// Selected (strategy, target) pairs in canonical order.
std::vector<DatasetKey> selected_keys(const RunConfig& config);

// Each returns a process exit status and logs a diagnostic on failure.
int cmd_generate(const RunConfig& config);
int cmd_score(const RunConfig& config);
int cmd_analyze(const RunConfig& config);
int cmd_full(const RunConfig& config);
// Renders SVG heatmaps from the JSON reports in out_dir.
int cmd_plot(const RunConfig& config);

// Parses argv and dispatches to a subcommand.
int run_cli(int argc, const char* const* argv);

}  // namespace readv

#endif  // READV_CLI_H_
