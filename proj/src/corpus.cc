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

#include "readv/corpus.h"

#include <spdlog/spdlog.h>

#include <unordered_map>
#include <utility>

#include "readv/errors.h"
#include "readv/io.h"

namespace readv {
namespace {

using ordered_json = nlohmann::ordered_json;

constexpr std::string_view kKnownKeys[] = {
    "id",       "token",    "subj_start", "subj_end",  "obj_start",
    "obj_end",  "subj_type", "obj_type",  "relation",  "subj_link",
    "obj_link",
};

bool is_known_key(std::string_view key) {
  for (std::string_view k : kKnownKeys) {
    if (k == key) return true;
  }
  return false;
}

std::string record_where(std::size_t index) {
  return "record " + std::to_string(index);
}

const ordered_json& require_field(const ordered_json& record,
                                  std::string_view key, std::size_t index) {
  auto it = record.find(key);
  if (it == record.end()) {
    throw ParseError(record_where(index) + ": missing field '" +
                     std::string(key) + "'");
  }
  return *it;
}

std::string string_field(const ordered_json& record, std::string_view key,
                         std::size_t index) {
  const ordered_json& v = require_field(record, key, index);
  if (!v.is_string()) {
    throw ParseError(record_where(index) + ": field '" + std::string(key) +
                     "' must be a string");
  }
  return v.get<std::string>();
}

int int_field(const ordered_json& record, std::string_view key,
              std::size_t index) {
  const ordered_json& v = require_field(record, key, index);
  if (!v.is_number_integer()) {
    throw ParseError(record_where(index) + ": field '" + std::string(key) +
                     "' must be an integer");
  }
  return v.get<int>();
}

std::optional<std::string> optional_link(const ordered_json& v,
                                         const std::string& where) {
  if (v.is_null()) return std::nullopt;
  if (!v.is_string()) throw ParseError(where + ": link must be string or null");
  return v.get<std::string>();
}

Example parse_record(const ordered_json& record, std::size_t index) {
  if (!record.is_object()) {
    throw ParseError(record_where(index) + ": expected an object");
  }
  Example ex;
  ex.id = string_field(record, "id", index);
  const ordered_json& tokens = require_field(record, "token", index);
  if (!tokens.is_array()) {
    throw ParseError(record_where(index) + ": field 'token' must be an array");
  }
  ex.tokens.reserve(tokens.size());
  for (const ordered_json& t : tokens) {
    if (!t.is_string()) {
      throw ParseError(record_where(index) +
                       ": field 'token' must contain only strings");
    }
    ex.tokens.push_back(t.get<std::string>());
  }
  ex.subj_span = {int_field(record, "subj_start", index),
                  int_field(record, "subj_end", index)};
  ex.obj_span = {int_field(record, "obj_start", index),
                 int_field(record, "obj_end", index)};
  ex.subj_type = string_field(record, "subj_type", index);
  ex.obj_type = string_field(record, "obj_type", index);
  ex.relation = string_field(record, "relation", index);
  if (auto it = record.find("subj_link"); it != record.end()) {
    ex.subj_link = optional_link(*it, record_where(index));
  }
  if (auto it = record.find("obj_link"); it != record.end()) {
    ex.obj_link = optional_link(*it, record_where(index));
  }
  for (auto it = record.begin(); it != record.end(); ++it) {
    if (!is_known_key(it.key())) ex.extra[it.key()] = it.value();
  }
  return ex;
}

void check_span(const Example& ex, const Span& span, std::string_view name) {
  const int n = static_cast<int>(ex.tokens.size());
  if (span.start < 0 || span.start > span.end || span.end >= n) {
    throw ValidationError(
        ex.id, std::string(name) + " span (" + std::to_string(span.start) +
                   ", " + std::to_string(span.end) +
                   ") out of bounds for " + std::to_string(n) + " tokens");
  }
}

void apply_links(std::vector<Example>& examples, std::string_view links_json) {
  ordered_json links;
  try {
    links = ordered_json::parse(links_json);
  } catch (const ordered_json::parse_error& e) {
    throw ParseError("links file, line " +
                     std::to_string(line_of_offset(links_json, e.byte)) +
                     ": " + e.what());
  }
  if (!links.is_object()) throw ParseError("links file must be a JSON object");

  std::unordered_map<std::string, Example*> by_id;
  by_id.reserve(examples.size());
  for (Example& ex : examples) by_id.emplace(ex.id, &ex);

  std::size_t unmatched = 0;
  for (auto it = links.begin(); it != links.end(); ++it) {
    const std::string where = "links entry '" + it.key() + "'";
    if (!it.value().is_object()) throw ParseError(where + ": expected object");
    auto found = by_id.find(it.key());
    if (found == by_id.end()) {
      ++unmatched;
      continue;
    }
    Example& ex = *found->second;
    ex.subj_link.reset();
    ex.obj_link.reset();
    if (auto s = it.value().find("subj"); s != it.value().end()) {
      ex.subj_link = optional_link(*s, where);
    }
    if (auto o = it.value().find("obj"); o != it.value().end()) {
      ex.obj_link = optional_link(*o, where);
    }
  }
  if (unmatched > 0) {
    spdlog::warn("links file: {} entries match no example id", unmatched);
  }
}

}  // namespace

const LabelSet& tacred_labels() {
  static const LabelSet labels = {
      "no_relation",
      "org:alternate_names",
      "org:city_of_headquarters",
      "org:country_of_headquarters",
      "org:dissolved",
      "org:founded",
      "org:founded_by",
      "org:member_of",
      "org:members",
      "org:number_of_employees/members",
      "org:parents",
      "org:political/religious_affiliation",
      "org:shareholders",
      "org:stateorprovince_of_headquarters",
      "org:subsidiaries",
      "org:top_members/employees",
      "org:website",
      "per:age",
      "per:alternate_names",
      "per:cause_of_death",
      "per:charges",
      "per:children",
      "per:cities_of_residence",
      "per:city_of_birth",
      "per:city_of_death",
      "per:countries_of_residence",
      "per:country_of_birth",
      "per:country_of_death",
      "per:date_of_birth",
      "per:date_of_death",
      "per:employee_of",
      "per:origin",
      "per:other_family",
      "per:parents",
      "per:religion",
      "per:schools_attended",
      "per:siblings",
      "per:spouse",
      "per:stateorprovince_of_birth",
      "per:stateorprovince_of_death",
      "per:stateorprovinces_of_residence",
      "per:title",
  };
  return labels;
}

Tokens Example::subj_surface() const {
  return Tokens(tokens.begin() + subj_span.start,
                tokens.begin() + subj_span.end + 1);
}

Tokens Example::obj_surface() const {
  return Tokens(tokens.begin() + obj_span.start,
                tokens.begin() + obj_span.end + 1);
}

void validate_example(const Example& ex, const LabelSet& labels) {
  check_span(ex, ex.subj_span, "subject");
  check_span(ex, ex.obj_span, "object");
  if (ex.subj_span.overlaps(ex.obj_span)) {
    throw ValidationError(ex.id, "subject and object spans overlap");
  }
  if (!labels.contains(ex.relation)) {
    throw ValidationError(ex.id, "relation '" + ex.relation +
                                     "' is not in the label set");
  }
  if (ex.subj_type.empty() || ex.obj_type.empty()) {
    throw ValidationError(ex.id, "empty entity type");
  }
}

Corpus::Corpus(std::vector<Example> examples, LabelSet labels)
    : examples_(std::move(examples)), label_set_(std::move(labels)) {
  label_set_.emplace(kNoRelation);
  index_.reserve(examples_.size());
  for (std::size_t i = 0; i < examples_.size(); ++i) {
    const Example& ex = examples_[i];
    if (!index_.emplace(ex.id, i).second) {
      throw ValidationError(ex.id, "duplicate example id");
    }
    validate_example(ex, label_set_);
    type_set_.insert(ex.subj_type);
    type_set_.insert(ex.obj_type);
  }
}

const Example* Corpus::find(std::string_view id) const {
  auto it = index_.find(std::string(id));
  return it == index_.end() ? nullptr : &examples_[it->second];
}

Corpus parse_corpus(std::string_view data_json,
                    std::optional<std::string_view> links_json,
                    const LoadOptions& options) {
  ordered_json records;
  try {
    records = ordered_json::parse(data_json);
  } catch (const ordered_json::parse_error& e) {
    throw ParseError("line " +
                     std::to_string(line_of_offset(data_json, e.byte)) +
                     ": " + e.what());
  }
  if (!records.is_array()) {
    throw ParseError("corpus must be a JSON array of records");
  }

  std::vector<Example> examples;
  examples.reserve(records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    examples.push_back(parse_record(records[i], i));
  }
  if (links_json) apply_links(examples, *links_json);

  LabelSet labels;
  if (options.infer_labels) {
    for (const Example& ex : examples) labels.insert(ex.relation);
  } else {
    labels = options.labels ? *options.labels : tacred_labels();
  }
  return Corpus(std::move(examples), std::move(labels));
}

Corpus load_corpus(const std::filesystem::path& data_path,
                   const std::optional<std::filesystem::path>& links_path,
                   const LoadOptions& options) {
  const std::string data = read_file(data_path);
  std::optional<std::string> links;
  if (links_path) links = read_file(*links_path);
  try {
    return parse_corpus(data, links ? std::optional<std::string_view>(*links)
                                    : std::nullopt,
                        options);
  } catch (const ParseError& e) {
    throw ParseError(data_path.string() + ": " + e.what());
  }
}

Corpus filter_linked(const Corpus& corpus) {
  std::vector<Example> kept;
  for (const Example& ex : corpus.examples()) {
    if (ex.fully_linked()) kept.push_back(ex);
  }
  return Corpus(std::move(kept), corpus.label_set());
}

ordered_json example_to_json(const Example& ex) {
  ordered_json record = ordered_json::object();
  record["id"] = ex.id;
  record["token"] = ex.tokens;
  record["subj_start"] = ex.subj_span.start;
  record["subj_end"] = ex.subj_span.end;
  record["obj_start"] = ex.obj_span.start;
  record["obj_end"] = ex.obj_span.end;
  record["subj_type"] = ex.subj_type;
  record["obj_type"] = ex.obj_type;
  record["relation"] = ex.relation;
  if (ex.subj_link) record["subj_link"] = *ex.subj_link;
  if (ex.obj_link) record["obj_link"] = *ex.obj_link;
  for (auto it = ex.extra.begin(); it != ex.extra.end(); ++it) {
    record[it.key()] = it.value();
  }
  return record;
}

std::string corpus_to_json(const Corpus& corpus) {
  // One record per line keeps large files diffable.
  std::string out = "[";
  bool first = true;
  for (const Example& ex : corpus.examples()) {
    out += first ? "\n" : ",\n";
    out += example_to_json(ex).dump();
    first = false;
  }
  out += first ? "]\n" : "\n]\n";
  return out;
}

void write_corpus(const Corpus& corpus, const std::filesystem::path& path) {
  write_file_atomic(path, corpus_to_json(corpus));
}

std::string links_to_json(const Corpus& corpus) {
  ordered_json links = ordered_json::object();
  for (const Example& ex : corpus.examples()) {
    ordered_json entry = ordered_json::object();
    entry["subj"] = ex.subj_link ? ordered_json(*ex.subj_link) : nullptr;
    entry["obj"] = ex.obj_link ? ordered_json(*ex.obj_link) : nullptr;
    links[ex.id] = std::move(entry);
  }
  return links.dump(2) + "\n";
}

}  // namespace readv
