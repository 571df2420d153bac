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

// Micro-averaged relation-extraction scoring with the conventions of the
// official TACRED scorer:
//
//   pred_positive = #{i : pred(i) != no_relation}
//   gold_positive = #{i : gold(i) != no_relation}
//   correct       = #{i : pred(i) == gold(i) != no_relation}
//   precision     = correct / pred_positive, or 1.0 when pred_positive == 0
//   recall        = correct / gold_positive, or 0.0 when gold_positive == 0
//   f1            = 2PR / (P + R), or 0.0 when P + R == 0

#ifndef READV_SCORING_H_
#define READV_SCORING_H_

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "readv/corpus.h"
#include "readv/substitution.h"

namespace readv {

// Predicted relation per example id, aligned with one gold corpus.
class PredictionSet {
 public:
  PredictionSet() = default;

  // Validates alignment with `gold`; throws the AlignmentError subclasses.
  PredictionSet(std::unordered_map<std::string, std::string> labels,
                const Corpus& gold);

  // Label for `id`; throws MissingPrediction.
  const std::string& at(std::string_view id) const;
  const std::string* find(std::string_view id) const;
  std::size_t size() const { return labels_.size(); }

 private:
  std::unordered_map<std::string, std::string> labels_;
};

// Parses JSON Lines of {"id": ..., "relation": ...}.
PredictionSet parse_predictions(std::string_view jsonl, const Corpus& gold);
PredictionSet load_predictions(const std::filesystem::path& path,
                               const Corpus& gold);
std::string predictions_to_jsonl(const Corpus& gold,
                                 const PredictionSet& preds);

struct ScoreCounts {
  std::size_t gold_positive = 0;
  std::size_t pred_positive = 0;
  std::size_t correct = 0;

  friend bool operator==(const ScoreCounts&, const ScoreCounts&) = default;
};

struct ScoreReport {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  ScoreCounts counts;
};

ScoreReport score(const Corpus& gold, const PredictionSet& preds);

// Applies the scorer's division conventions to raw counts.
ScoreReport report_from_counts(const ScoreCounts& counts);

struct ScoredDataset {
  const Corpus* gold = nullptr;
  const PredictionSet* preds = nullptr;
};

struct SuiteResult {
  ScoreReport standard;
  std::map<DatasetKey, std::optional<ScoreReport>> cells;  // all 12 keys
  // Mean F1 over the filled cells; absent when none are filled.
  std::optional<double> adversarial_f1;
  // (adv - std) / std * 100; absent without cells or when std F1 is 0.
  std::optional<double> diff_percent;
};

// Scores the baseline and every present cell. Keys missing from `cells`
// are reported as gaps.
SuiteResult score_suite(const std::map<DatasetKey, ScoredDataset>& cells,
                        const ScoredDataset& baseline);

// Summary from already-computed F1 values.
SuiteResult summarize_suite(
    const ScoreReport& standard,
    const std::map<DatasetKey, std::optional<ScoreReport>>& cells);

nlohmann::ordered_json score_report_to_json(const ScoreReport& report);
nlohmann::ordered_json suite_to_json(const SuiteResult& suite);
// Plain-text table: std., adv., diff., then one column per cell (F1 x 100).
std::string suite_to_table(const SuiteResult& suite,
                           std::string_view model_name = "model");

}  // namespace readv

#endif  // READV_SCORING_H_
