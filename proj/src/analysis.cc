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

#include "readv/analysis.h"

#include <fmt/format.h>

#include <algorithm>
#include <cctype>

#include "readv/errors.h"
#include "readv/io.h"

namespace readv {
namespace {

std::string lowercase(std::string_view s) {
  std::string out(s);
  for (char& c : out) {
    c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  return out;
}

std::string_view tag(Sensitivity s) {
  return s == Sensitivity::kSubject ? "subject" : "object";
}

std::string csv_number(const std::optional<double>& v) {
  return v ? fmt::format("{:.6f}", *v) : std::string();
}

}  // namespace

double no_relation_drift(const Corpus& gold, const PredictionSet& preds) {
  if (gold.empty()) return 0.0;
  long long pred_none = 0;
  long long gold_none = 0;
  for (const Example& ex : gold.examples()) {
    if (ex.relation == kNoRelation) ++gold_none;
    if (preds.at(ex.id) == kNoRelation) ++pred_none;
  }
  return static_cast<double>(pred_none - gold_none) /
         static_cast<double>(gold.size()) * 100.0;
}

void TypeConstraintTable::add(const std::string& subj_type,
                              const std::string& obj_type,
                              const std::string& relation) {
  pairs_[{subj_type, obj_type}].insert(relation);
  signatures_[relation].insert({subj_type, obj_type});
}

const LabelSet& TypeConstraintTable::allowed(std::string_view subj_type,
                                             std::string_view obj_type) const {
  static const LabelSet kOnlyNoRelation = {std::string(kNoRelation)};
  if (subj_type == kNoneType || obj_type == kNoneType) return kOnlyNoRelation;
  auto it = pairs_.find({std::string(subj_type), std::string(obj_type)});
  return it == pairs_.end() ? kOnlyNoRelation : it->second;
}

bool TypeConstraintTable::contains(std::string_view subj_type,
                                   std::string_view obj_type) const {
  return pairs_.contains({std::string(subj_type), std::string(obj_type)});
}

const std::set<TypePair>& TypeConstraintTable::signature(
    std::string_view relation) const {
  static const std::set<TypePair> kEmpty;
  auto it = signatures_.find(relation);
  return it == signatures_.end() ? kEmpty : it->second;
}

TypeConstraintTable build_constraint_table(const Corpus& train) {
  TypeConstraintTable table;
  for (const Example& ex : train.examples()) {
    if (ex.subj_type == kNoneType || ex.obj_type == kNoneType) continue;
    table.add(ex.subj_type, ex.obj_type, ex.relation);
  }
  return table;
}

bool adheres(const Example& ex, const std::string& predicted,
             const TypeConstraintTable& table,
             const AdherenceOptions& options) {
  if (options.no_relation_always_allowed && predicted == kNoRelation) {
    return true;
  }
  return table.allowed(ex.subj_type, ex.obj_type).contains(predicted);
}

AdherenceReport adherence(const Corpus& adv, const PredictionSet& preds,
                          const TypeConstraintTable& table,
                          const AdherenceOptions& options) {
  AdherenceReport report;
  for (const Example& ex : adv.examples()) {
    if (options.positive_gold_only && ex.relation == kNoRelation) continue;
    ++report.total;
    if (adheres(ex, preds.at(ex.id), table, options)) ++report.adherent;
  }
  return report;
}

ConfusableSets::ConfusableSets(std::vector<ConfusableGroup> groups,
                               const LabelSet& labels)
    : groups_(std::move(groups)) {
  LabelSet seen;
  std::set<std::string> names;
  for (const ConfusableGroup& g : groups_) {
    if (!names.insert(g.name).second) {
      throw ValidationError(g.name, "duplicate confusable group name");
    }
    for (const std::string& r : g.relations) {
      if (!labels.contains(r)) {
        throw ValidationError(g.name, "relation '" + r +
                                          "' is not in the label set");
      }
      if (!seen.insert(r).second) {
        throw ValidationError(g.name, "relation '" + r +
                                          "' belongs to more than one group");
      }
    }
  }
}

ConfusableSets ConfusableSets::defaults() {
  using S = Sensitivity;
  return ConfusableSets(
      {
          {"residence",
           S::kSubject,
           {"per:countries_of_residence", "per:cities_of_residence",
            "per:stateorprovinces_of_residence"}},
          {"headquarter",
           S::kSubject,
           {"org:country_of_headquarters", "org:city_of_headquarters",
            "org:stateorprovince_of_headquarters"}},
          {"death",
           S::kSubject,
           {"per:city_of_death", "per:stateorprovince_of_death",
            "per:country_of_death"}},
          {"birth",
           S::kSubject,
           {"per:city_of_birth", "per:stateorprovince_of_birth",
            "per:country_of_birth", "per:origin"}},
          {"name", S::kObject, {"org:alternate_names", "per:alternate_names"}},
          {"religion",
           S::kObject,
           {"per:religion", "org:political/religious_affiliation"}},
          {"member",
           S::kObject,
           {"org:member_of", "org:top_members/employees", "per:employee_of"}},
      },
      tacred_labels());
}

const ConfusableGroup& ConfusableSets::group(std::string_view name) const {
  for (const ConfusableGroup& g : groups_) {
    if (g.name == name) return g;
  }
  throw Error("unknown confusable group '" + std::string(name) + "'");
}

const ConfusableGroup* ConfusableSets::group_of(
    std::string_view relation) const {
  for (const ConfusableGroup& g : groups_) {
    if (std::find(g.relations.begin(), g.relations.end(), relation) !=
        g.relations.end()) {
      return &g;
    }
  }
  return nullptr;
}

ConfusableSets parse_confusable_sets(std::string_view json,
                                     const LabelSet& labels) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError("confusable sets, line " +
                     std::to_string(line_of_offset(json, e.byte)) + ": " +
                     e.what());
  }
  auto groups_it = doc.find("groups");
  if (!doc.is_object() || groups_it == doc.end() || !groups_it->is_array()) {
    throw ParseError("confusable sets: expected {\"groups\": [...]}");
  }
  std::vector<ConfusableGroup> groups;
  for (const nlohmann::json& g : *groups_it) {
    try {
      ConfusableGroup group;
      group.name = g.at("name").get<std::string>();
      const std::string s = g.value("sensitivity", "subject");
      if (s == "subject") {
        group.sensitivity = Sensitivity::kSubject;
      } else if (s == "object") {
        group.sensitivity = Sensitivity::kObject;
      } else {
        throw ParseError("confusable group '" + group.name +
                         "': sensitivity must be subject or object");
      }
      group.relations = g.at("relations").get<std::vector<std::string>>();
      groups.push_back(std::move(group));
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(std::string("confusable sets: ") + e.what());
    }
  }
  return ConfusableSets(std::move(groups), labels);
}

ConfusableSets load_confusable_sets(const std::filesystem::path& path,
                                    const LabelSet& labels) {
  return parse_confusable_sets(read_file(path), labels);
}

nlohmann::ordered_json confusable_sets_to_json(const ConfusableSets& sets) {
  nlohmann::ordered_json groups = nlohmann::ordered_json::array();
  for (const ConfusableGroup& g : sets.groups()) {
    groups.push_back({{"name", g.name},
                      {"sensitivity", tag(g.sensitivity)},
                      {"relations", g.relations}});
  }
  return {{"groups", groups}};
}

std::optional<double> FlowMatrix::in_set_percent() const {
  if (changed == 0) return std::nullopt;
  return 100.0 * static_cast<double>(in_set_changes) /
         static_cast<double>(changed);
}

std::size_t FlowMatrix::row_sum(std::size_t row) const {
  std::size_t sum = 0;
  for (std::size_t c : counts.at(row)) sum += c;
  return sum;
}

std::size_t FlowMatrix::bucket(std::string_view label) const {
  for (std::size_t i = 0; i + 1 < labels.size(); ++i) {
    if (labels[i] == label) return i;
  }
  return labels.size() - 1;
}

FlowMatrix confusable_flow(const PredictionSet& baseline_preds,
                           const PredictionSet& adv_preds, const Corpus& gold,
                           const ConfusableSets& sets, std::string_view group) {
  const ConfusableGroup& g = sets.group(group);
  FlowMatrix flow;
  flow.group = g.name;
  flow.labels = g.relations;
  flow.labels.emplace_back(kNoRelation);
  flow.labels.emplace_back(kOtherBucket);
  flow.counts.assign(flow.labels.size(),
                     std::vector<std::size_t>(flow.labels.size(), 0));

  auto in_group = [&](std::string_view r) {
    return std::find(g.relations.begin(), g.relations.end(), r) !=
           g.relations.end();
  };
  for (const Example& ex : gold.examples()) {
    if (!in_group(ex.relation)) continue;
    const std::string* before = baseline_preds.find(ex.id);
    const std::string* after = adv_preds.find(ex.id);
    if (before == nullptr || after == nullptr) continue;
    ++flow.analyzed;
    ++flow.counts[flow.bucket(*before)][flow.bucket(*after)];
    if (*before != *after) {
      ++flow.changed;
      if (in_group(*before) && in_group(*after)) ++flow.in_set_changes;
    }
  }
  return flow;
}

std::set<std::string> context_tokens(const Example& ex) {
  std::set<std::string> out;
  for (int i = 0; i < static_cast<int>(ex.tokens.size()); ++i) {
    if (ex.subj_span.contains(i) || ex.obj_span.contains(i)) continue;
    out.insert(lowercase(ex.tokens[i]));
  }
  return out;
}

double jaccard(const std::set<std::string>& a,
               const std::set<std::string>& b) {
  if (a.empty() && b.empty()) return 1.0;
  std::size_t common = 0;
  auto ia = a.begin();
  auto ib = b.begin();
  while (ia != a.end() && ib != b.end()) {
    if (*ia < *ib) {
      ++ia;
    } else if (*ib < *ia) {
      ++ib;
    } else {
      ++common;
      ++ia;
      ++ib;
    }
  }
  return static_cast<double>(common) /
         static_cast<double>(a.size() + b.size() - common);
}

std::vector<JaccardMatrix> jaccard_groups(const Corpus& corpus,
                                          const ConfusableSets& sets,
                                          JaccardMode mode) {
  std::vector<JaccardMatrix> out;
  for (const ConfusableGroup& g : sets.groups()) {
    const std::size_t n = g.relations.size();
    std::vector<std::vector<std::set<std::string>>> sentences(n);
    for (const Example& ex : corpus.examples()) {
      auto it = std::find(g.relations.begin(), g.relations.end(), ex.relation);
      if (it == g.relations.end()) continue;
      sentences[it - g.relations.begin()].push_back(context_tokens(ex));
    }

    JaccardMatrix m;
    m.group = g.name;
    m.relations = g.relations;
    m.values.assign(n, std::vector<std::optional<double>>(n));
    std::vector<std::set<std::string>> aggregate(n);
    for (std::size_t i = 0; i < n; ++i) {
      m.sentence_counts.push_back(sentences[i].size());
      for (const auto& s : sentences[i]) aggregate[i].insert(s.begin(), s.end());
    }
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if (sentences[i].empty() || sentences[j].empty()) continue;
        if (i == j) {
          m.values[i][j] = 1.0;
        } else if (mode == JaccardMode::kRelationAggregate) {
          m.values[i][j] = jaccard(aggregate[i], aggregate[j]);
        } else {
          double sum = 0.0;
          for (const auto& a : sentences[i]) {
            for (const auto& b : sentences[j]) sum += jaccard(a, b);
          }
          m.values[i][j] = sum / static_cast<double>(sentences[i].size() *
                                                     sentences[j].size());
        }
      }
    }
    out.push_back(std::move(m));
  }
  return out;
}

namespace {

void count_critical(const Example& ex, const ConfusableSets& sets,
                    const TypeConstraintTable& table,
                    std::map<std::string, CriticalRate>& rates) {
  const ConfusableGroup* g = sets.group_of(ex.relation);
  if (g == nullptr) return;
  CriticalRate& rate = rates[ex.relation];
  ++rate.generated;
  const TypePair pair{ex.subj_type, ex.obj_type};
  for (const std::string& sibling : g->relations) {
    if (sibling != ex.relation && table.signature(sibling).contains(pair)) {
      ++rate.critical;
      return;
    }
  }
}

}  // namespace

std::map<std::string, CriticalRate> critical_generation_rate(
    const std::vector<AdversarialExample>& adv, const ConfusableSets& sets,
    const TypeConstraintTable& table) {
  std::map<std::string, CriticalRate> rates;
  for (const AdversarialExample& a : adv) {
    count_critical(a.example, sets, table, rates);
  }
  return rates;
}

std::map<std::string, CriticalRate> critical_generation_rate(
    const Corpus& adv, const ConfusableSets& sets,
    const TypeConstraintTable& table) {
  std::map<std::string, CriticalRate> rates;
  for (const Example& ex : adv.examples()) {
    count_critical(ex, sets, table, rates);
  }
  return rates;
}

nlohmann::ordered_json flow_to_json(const FlowMatrix& flow) {
  nlohmann::ordered_json j = nlohmann::ordered_json::object();
  j["group"] = flow.group;
  j["labels"] = flow.labels;
  j["counts"] = flow.counts;
  j["analyzed"] = flow.analyzed;
  j["changed"] = flow.changed;
  j["in_set_changes"] = flow.in_set_changes;
  auto pct = flow.in_set_percent();
  j["in_set_percent"] = pct ? nlohmann::ordered_json(*pct)
                            : nlohmann::ordered_json(nullptr);
  return j;
}

std::string flow_to_csv(const FlowMatrix& flow) {
  std::string out = "baseline\\adversarial";
  for (const std::string& l : flow.labels) out += "," + l;
  out += "\n";
  for (std::size_t i = 0; i < flow.labels.size(); ++i) {
    out += flow.labels[i];
    for (std::size_t c : flow.counts[i]) out += "," + std::to_string(c);
    out += "\n";
  }
  return out;
}

nlohmann::ordered_json jaccard_to_json(const JaccardMatrix& m) {
  nlohmann::ordered_json values = nlohmann::ordered_json::array();
  for (const auto& row : m.values) {
    nlohmann::ordered_json r = nlohmann::ordered_json::array();
    for (const auto& v : row) {
      r.push_back(v ? nlohmann::ordered_json(*v)
                    : nlohmann::ordered_json(nullptr));
    }
    values.push_back(std::move(r));
  }
  nlohmann::ordered_json j = nlohmann::ordered_json::object();
  j["group"] = m.group;
  j["relations"] = m.relations;
  j["sentence_counts"] = m.sentence_counts;
  j["values"] = std::move(values);
  return j;
}

std::string jaccard_to_csv(const JaccardMatrix& m) {
  std::string out = "relation";
  for (const std::string& r : m.relations) out += "," + r;
  out += "\n";
  for (std::size_t i = 0; i < m.relations.size(); ++i) {
    out += m.relations[i];
    for (const auto& v : m.values[i]) out += "," + csv_number(v);
    out += "\n";
  }
  return out;
}

}  // namespace readv
