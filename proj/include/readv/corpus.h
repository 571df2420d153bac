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

// Relation-extraction corpora in TACRED JSON format.
//
// A record is a JSON object with the keys id, token, subj_start, subj_end,
// obj_start, obj_end, subj_type, obj_type and relation. Spans are inclusive
// and 0-based: the subject mention is token[subj_start..subj_end]. Any other
// keys of a record are kept in Example::extra and written back unchanged.
//
// Knowledge-base links come from a separate JSON object mapping example id
// to {"subj": id-or-null, "obj": id-or-null}. When a corpus is written the
// links travel inside each record as "subj_link"/"obj_link" so that
// load_corpus(write_corpus(c)) restores them without a links file.

#ifndef READV_CORPUS_H_
#define READV_CORPUS_H_

#include <cstddef>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "json.hpp"

namespace readv {

inline constexpr std::string_view kNoRelation = "no_relation";
inline constexpr std::string_view kNoneType = "NONE";
inline constexpr std::string_view kMaskToken = "[MASK]";

using Tokens = std::vector<std::string>;
using LabelSet = std::set<std::string, std::less<>>;

// The 41 TACRED relations plus no_relation.
const LabelSet& tacred_labels();

// Inclusive token span.
struct Span {
  int start = 0;
  int end = 0;

  int length() const { return end - start + 1; }
  bool contains(int i) const { return start <= i && i <= end; }
  bool overlaps(const Span& other) const {
    return start <= other.end && other.start <= end;
  }
  friend bool operator==(const Span&, const Span&) = default;
};

struct Example {
  std::string id;
  Tokens tokens;
  Span subj_span;
  Span obj_span;
  std::string subj_type;
  std::string obj_type;
  std::string relation;
  std::optional<std::string> subj_link;
  std::optional<std::string> obj_link;
  // Unrecognized record keys, preserved on round-trip.
  nlohmann::ordered_json extra = nlohmann::ordered_json::object();

  bool fully_linked() const { return subj_link && obj_link; }
  Tokens subj_surface() const;
  Tokens obj_surface() const;

  friend bool operator==(const Example&, const Example&) = default;
};

class Corpus {
 public:
  Corpus() = default;

  // Validates every example against `labels`; throws ValidationError.
  Corpus(std::vector<Example> examples, LabelSet labels);

  const std::vector<Example>& examples() const { return examples_; }
  const LabelSet& label_set() const { return label_set_; }
  const LabelSet& type_set() const { return type_set_; }

  std::size_t size() const { return examples_.size(); }
  bool empty() const { return examples_.empty(); }

  // Example with `id`, or nullptr.
  const Example* find(std::string_view id) const;

  friend bool operator==(const Corpus& a, const Corpus& b) {
    return a.examples_ == b.examples_ && a.label_set_ == b.label_set_;
  }

 private:
  std::vector<Example> examples_;
  LabelSet label_set_;
  LabelSet type_set_;
  std::unordered_map<std::string, std::size_t> index_;
};

// Throws ValidationError when `ex` violates a span or label invariant.
void validate_example(const Example& ex, const LabelSet& labels);

struct LoadOptions {
  // Closed relation label set; defaults to tacred_labels(). no_relation is
  // always added.
  std::optional<LabelSet> labels;
  // Build the label set from the labels observed in the file instead.
  bool infer_labels = false;
};

Corpus load_corpus(const std::filesystem::path& data_path,
                   const std::optional<std::filesystem::path>& links_path = {},
                   const LoadOptions& options = {});

// Same as load_corpus but from in-memory JSON text.
Corpus parse_corpus(std::string_view data_json,
                    std::optional<std::string_view> links_json = {},
                    const LoadOptions& options = {});

// Examples whose subject and object are both linked, in order.
Corpus filter_linked(const Corpus& corpus);

nlohmann::ordered_json example_to_json(const Example& ex);
std::string corpus_to_json(const Corpus& corpus);
void write_corpus(const Corpus& corpus, const std::filesystem::path& path);

// Links file for `corpus` in the loader's format.
std::string links_to_json(const Corpus& corpus);

}  // namespace readv

#endif  // READV_CORPUS_H_
