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

// Diagnostics over model predictions on original and adversarial data:
// no_relation drift, type-constraint adherence, flow between mutually
// confusable relations, token overlap between those relations, and the
// rate at which type-changing substitution yields a sibling relation's
// type signature.

#ifndef READV_ANALYSIS_H_
#define READV_ANALYSIS_H_

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "readv/corpus.h"
#include "readv/scoring.h"
#include "readv/substitution.h"

namespace readv {

// (pred no_relation - gold no_relation) / |gold| * 100. 0 for an empty
// corpus.
double no_relation_drift(const Corpus& gold, const PredictionSet& preds);

using TypePair = std::pair<std::string, std::string>;

// Relations observed for each (subject type, object type) pair.
class TypeConstraintTable {
 public:
  void add(const std::string& subj_type, const std::string& obj_type,
           const std::string& relation);

  // Relations allowed for a pair. A pair involving NONE, or never
  // observed, allows only no_relation.
  const LabelSet& allowed(std::string_view subj_type,
                          std::string_view obj_type) const;
  bool contains(std::string_view subj_type, std::string_view obj_type) const;

  // Type pairs observed with `relation`.
  const std::set<TypePair>& signature(std::string_view relation) const;

  const std::map<TypePair, LabelSet>& pairs() const { return pairs_; }

 private:
  std::map<TypePair, LabelSet> pairs_;
  std::map<std::string, std::set<TypePair>, std::less<>> signatures_;
};

TypeConstraintTable build_constraint_table(const Corpus& train);

struct AdherenceOptions {
  // Count a no_relation prediction as adherent even when the (observed)
  // type pair never occurred with no_relation.
  bool no_relation_always_allowed = false;
  // Restrict the denominator to examples with a positive gold relation.
  bool positive_gold_only = false;
};

struct AdherenceReport {
  std::size_t adherent = 0;
  std::size_t total = 0;

  // Fraction in [0, 1]; 1 for an empty denominator.
  double fraction() const {
    return total == 0 ? 1.0
                      : static_cast<double>(adherent) /
                            static_cast<double>(total);
  }
  double percent() const { return fraction() * 100.0; }
};

bool adheres(const Example& ex, const std::string& predicted,
             const TypeConstraintTable& table,
             const AdherenceOptions& options = {});

AdherenceReport adherence(const Corpus& adv, const PredictionSet& preds,
                          const TypeConstraintTable& table,
                          const AdherenceOptions& options = {});

enum class Sensitivity { kSubject, kObject };

struct ConfusableGroup {
  std::string name;
  Sensitivity sensitivity;
  std::vector<std::string> relations;
};

class ConfusableSets {
 public:
  ConfusableSets() = default;
  // Throws ValidationError for overlapping groups or labels outside
  // `labels`.
  ConfusableSets(std::vector<ConfusableGroup> groups, const LabelSet& labels);

  // Residence, headquarter, death, birth (subject sensitive) and name,
  // religion, member (object sensitive) over the TACRED labels.
  static ConfusableSets defaults();

  const std::vector<ConfusableGroup>& groups() const { return groups_; }
  // Throws Error for an unknown name.
  const ConfusableGroup& group(std::string_view name) const;
  // Group containing `relation`, or nullptr.
  const ConfusableGroup* group_of(std::string_view relation) const;

 private:
  std::vector<ConfusableGroup> groups_;
};

// JSON: {"groups": [{"name", "sensitivity": "subject"|"object",
// "relations": [...]}, ...]}
ConfusableSets parse_confusable_sets(std::string_view json,
                                     const LabelSet& labels);
ConfusableSets load_confusable_sets(const std::filesystem::path& path,
                                    const LabelSet& labels);
nlohmann::ordered_json confusable_sets_to_json(const ConfusableSets& sets);

inline constexpr std::string_view kOtherBucket = "other";

struct FlowMatrix {
  std::string group;
  // Group relations, then no_relation, then "other".
  std::vector<std::string> labels;
  // counts[i][j]: baseline prediction labels[i] -> adversarial labels[j].
  std::vector<std::vector<std::size_t>> counts;
  std::size_t analyzed = 0;
  std::size_t changed = 0;
  // Changes from one group relation to another group relation.
  std::size_t in_set_changes = 0;

  // in_set_changes / changed * 100; absent when nothing changed.
  std::optional<double> in_set_percent() const;
  std::size_t row_sum(std::size_t row) const;
  std::size_t bucket(std::string_view label) const;
};

// Transitions for examples whose gold relation is in `group` and that
// appear in both prediction sets. Baseline predictions are keyed by the
// ids of `gold`; adversarial predictions by the (identical) ids of the
// adversarial dataset.
FlowMatrix confusable_flow(const PredictionSet& baseline_preds,
                           const PredictionSet& adv_preds, const Corpus& gold,
                           const ConfusableSets& sets, std::string_view group);

enum class JaccardMode {
  // One token set per relation (union over its sentences).
  kRelationAggregate,
  // Mean Jaccard over sentence pairs drawn from the two relations.
  kSentencePairMean,
};

struct JaccardMatrix {
  std::string group;
  std::vector<std::string> relations;
  std::vector<std::size_t> sentence_counts;
  // Absent when either relation has no sentences.
  std::vector<std::vector<std::optional<double>>> values;
};

// Lower-cased tokens of `ex` with both entity mentions removed.
std::set<std::string> context_tokens(const Example& ex);

double jaccard(const std::set<std::string>& a, const std::set<std::string>& b);

std::vector<JaccardMatrix> jaccard_groups(
    const Corpus& corpus, const ConfusableSets& sets,
    JaccardMode mode = JaccardMode::kRelationAggregate);

struct CriticalRate {
  std::size_t critical = 0;
  std::size_t generated = 0;
  double percent() const {
    return generated == 0 ? 0.0
                          : 100.0 * static_cast<double>(critical) /
                                static_cast<double>(generated);
  }
};

// For each gold relation of a confusable group that has adversarial
// examples: how many of them carry a type pair observed for a different
// relation of the same group.
std::map<std::string, CriticalRate> critical_generation_rate(
    const std::vector<AdversarialExample>& adv, const ConfusableSets& sets,
    const TypeConstraintTable& table);
// Same, over a dataset read back from disk.
std::map<std::string, CriticalRate> critical_generation_rate(
    const Corpus& adv, const ConfusableSets& sets,
    const TypeConstraintTable& table);

nlohmann::ordered_json flow_to_json(const FlowMatrix& flow);
std::string flow_to_csv(const FlowMatrix& flow);
nlohmann::ordered_json jaccard_to_json(const JaccardMatrix& m);
std::string jaccard_to_csv(const JaccardMatrix& m);

}  // namespace readv

#endif  // READV_ANALYSIS_H_
