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

#include "readv/scoring.h"

#include <fmt/format.h>

#include <utility>

#include "readv/errors.h"
#include "readv/io.h"

namespace readv {

PredictionSet::PredictionSet(
    std::unordered_map<std::string, std::string> labels, const Corpus& gold)
    : labels_(std::move(labels)) {
  for (const auto& [id, label] : labels_) {
    if (gold.find(id) == nullptr) throw UnknownId(id);
    if (!gold.label_set().contains(label)) throw UnknownLabel(id, label);
  }
  for (const Example& ex : gold.examples()) {
    if (!labels_.contains(ex.id)) throw MissingPrediction(ex.id);
  }
}

const std::string& PredictionSet::at(std::string_view id) const {
  const std::string* label = find(id);
  if (label == nullptr) throw MissingPrediction(std::string(id));
  return *label;
}

const std::string* PredictionSet::find(std::string_view id) const {
  auto it = labels_.find(std::string(id));
  return it == labels_.end() ? nullptr : &it->second;
}

PredictionSet parse_predictions(std::string_view jsonl, const Corpus& gold) {
  std::unordered_map<std::string, std::string> labels;
  for_each_json_line(jsonl, [&](const nlohmann::json& v, std::size_t line) {
    const std::string where = "line " + std::to_string(line);
    if (!v.is_object()) throw ParseError(where + ": expected an object");
    auto id = v.find("id");
    auto rel = v.find("relation");
    if (id == v.end() || !id->is_string()) {
      throw ParseError(where + ": missing string field 'id'");
    }
    if (rel == v.end() || !rel->is_string()) {
      throw ParseError(where + ": missing string field 'relation'");
    }
    std::string key = id->get<std::string>();
    std::string label = rel->get<std::string>();
    if (gold.find(key) == nullptr) throw UnknownId(key);
    if (!gold.label_set().contains(label)) throw UnknownLabel(key, label);
    if (!labels.emplace(key, std::move(label)).second) throw DuplicateId(key);
  });
  return PredictionSet(std::move(labels), gold);
}

PredictionSet load_predictions(const std::filesystem::path& path,
                               const Corpus& gold) {
  const std::string text = read_file(path);
  try {
    return parse_predictions(text, gold);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

std::string predictions_to_jsonl(const Corpus& gold,
                                 const PredictionSet& preds) {
  std::string out;
  for (const Example& ex : gold.examples()) {
    nlohmann::ordered_json j = nlohmann::ordered_json::object();
    j["id"] = ex.id;
    j["relation"] = preds.at(ex.id);
    out += j.dump();
    out += '\n';
  }
  return out;
}

ScoreReport report_from_counts(const ScoreCounts& counts) {
  ScoreReport r;
  r.counts = counts;
  r.precision = counts.pred_positive > 0
                    ? static_cast<double>(counts.correct) /
                          static_cast<double>(counts.pred_positive)
                    : 1.0;
  r.recall = counts.gold_positive > 0
                 ? static_cast<double>(counts.correct) /
                       static_cast<double>(counts.gold_positive)
                 : 0.0;
  r.f1 = r.precision + r.recall > 0.0
             ? 2.0 * r.precision * r.recall / (r.precision + r.recall)
             : 0.0;
  return r;
}

ScoreReport score(const Corpus& gold, const PredictionSet& preds) {
  ScoreCounts counts;
  for (const Example& ex : gold.examples()) {
    const std::string& guess = preds.at(ex.id);
    const bool gold_pos = ex.relation != kNoRelation;
    const bool pred_pos = guess != kNoRelation;
    if (gold_pos) ++counts.gold_positive;
    if (pred_pos) ++counts.pred_positive;
    if (gold_pos && pred_pos && guess == ex.relation) ++counts.correct;
  }
  return report_from_counts(counts);
}

SuiteResult summarize_suite(
    const ScoreReport& standard,
    const std::map<DatasetKey, std::optional<ScoreReport>>& cells) {
  SuiteResult suite;
  suite.standard = standard;
  for (const DatasetKey& key : all_dataset_keys()) {
    auto it = cells.find(key);
    suite.cells[key] = it == cells.end() ? std::nullopt : it->second;
  }
  double sum = 0.0;
  std::size_t filled = 0;
  for (const auto& [key, cell] : suite.cells) {
    if (!cell) continue;
    sum += cell->f1;
    ++filled;
  }
  if (filled > 0) {
    suite.adversarial_f1 = sum / static_cast<double>(filled);
    if (standard.f1 > 0.0) {
      suite.diff_percent =
          (*suite.adversarial_f1 - standard.f1) / standard.f1 * 100.0;
    }
  }
  return suite;
}

SuiteResult score_suite(const std::map<DatasetKey, ScoredDataset>& cells,
                        const ScoredDataset& baseline) {
  std::map<DatasetKey, std::optional<ScoreReport>> scored;
  for (const auto& [key, data] : cells) {
    if (data.gold == nullptr || data.preds == nullptr) continue;
    scored[key] = score(*data.gold, *data.preds);
  }
  return summarize_suite(score(*baseline.gold, *baseline.preds), scored);
}

nlohmann::ordered_json score_report_to_json(const ScoreReport& report) {
  nlohmann::ordered_json j = nlohmann::ordered_json::object();
  j["p"] = report.precision;
  j["r"] = report.recall;
  j["f1"] = report.f1;
  j["counts"] = {{"gold_positive", report.counts.gold_positive},
                 {"pred_positive", report.counts.pred_positive},
                 {"correct", report.counts.correct}};
  return j;
}

nlohmann::ordered_json suite_to_json(const SuiteResult& suite) {
  using ordered_json = nlohmann::ordered_json;
  ordered_json cells = ordered_json::object();
  for (Strategy s : kAllStrategies) {
    ordered_json row = ordered_json::object();
    for (Target t : kAllTargets) {
      const auto& cell = suite.cells.at({s, t});
      row[std::string(tag(t))] =
          cell ? score_report_to_json(*cell) : ordered_json(nullptr);
    }
    cells[std::string(tag(s))] = std::move(row);
  }
  ordered_json j = ordered_json::object();
  j["std"] = score_report_to_json(suite.standard);
  j["adv"] = suite.adversarial_f1 ? ordered_json(*suite.adversarial_f1)
                                  : ordered_json(nullptr);
  j["diff"] = suite.diff_percent ? ordered_json(*suite.diff_percent)
                                 : ordered_json(nullptr);
  j["cells"] = std::move(cells);
  return j;
}

std::string suite_to_table(const SuiteResult& suite,
                           std::string_view model_name) {
  auto pct = [](std::optional<double> f1) {
    return f1 ? fmt::format("{:.1f}", *f1 * 100.0) : std::string("--");
  };
  std::string out;
  out += fmt::format("{:<12} {:>6} {:>6} {:>8}", "", "", "", "");
  for (Strategy s : kAllStrategies) {
    out += fmt::format(" | {:<21}", std::string(tag(s)) + " sub.");
  }
  out += "\n";
  out += fmt::format("{:<12} {:>6} {:>6} {:>8}", "Model", "std.", "adv.",
                     "diff.");
  for (std::size_t i = 0; i < kAllStrategies.size(); ++i) {
    out += fmt::format(" | {:>6}{:>6}{:>9}", "subj", "obj", "subj+obj");
  }
  out += "\n";
  const std::string diff =
      suite.diff_percent ? fmt::format("{:+.1f}%", *suite.diff_percent) : "--";
  out += fmt::format("{:<12} {:>6} {:>6} {:>8}", model_name,
                     pct(suite.standard.f1), pct(suite.adversarial_f1), diff);
  for (Strategy s : kAllStrategies) {
    std::array<std::string, 3> v;
    for (std::size_t i = 0; i < kAllTargets.size(); ++i) {
      const auto& cell = suite.cells.at({s, kAllTargets[i]});
      v[i] = pct(cell ? std::optional<double>(cell->f1) : std::nullopt);
    }
    out += fmt::format(" | {:>6}{:>6}{:>9}", v[0], v[1], v[2]);
  }
  out += "\n";
  return out;
}

}  // namespace readv
