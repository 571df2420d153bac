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

// Entity-substitution engine.
//
// Four strategies replace the subject, the object, or both mentions of a
// labelled sentence while keeping the relation label and every context
// token:
//
//   same_role  donor entity fills the same role for the same relation.
//   same_type  donor entity has the original type and fills the same role
//              in a sentence with a different relation.
//   diff_type  donor entity has a different type and never fills the same
//              role for the original relation anywhere in the pool.
//   masking    the mention becomes the single token [MASK], type NONE.
//
// Randomness is derived per (seed, example id, strategy, target, role), so
// generation output does not depend on scheduling or thread count.

#ifndef READV_SUBSTITUTION_H_
#define READV_SUBSTITUTION_H_

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <tuple>
#include <unordered_map>
#include <variant>
#include <vector>

#include "readv/corpus.h"
#include "readv/errors.h"

namespace readv {

enum class Role { kSubj, kObj };
enum class Target { kSubjOnly, kObjOnly, kBoth };
enum class Strategy { kSameRole, kSameType, kDiffType, kMasking };

inline constexpr std::array<Role, 2> kAllRoles = {Role::kSubj, Role::kObj};
inline constexpr std::array<Target, 3> kAllTargets = {
    Target::kSubjOnly, Target::kObjOnly, Target::kBoth};
inline constexpr std::array<Strategy, 4> kAllStrategies = {
    Strategy::kSameRole, Strategy::kSameType, Strategy::kDiffType,
    Strategy::kMasking};

// Lower-case tags used in file names and JSON: "subj"/"obj",
// "subj"/"obj"/"both", "same_role"/"same_type"/"diff_type"/"masking".
std::string_view tag(Role role);
std::string_view tag(Target target);
std::string_view tag(Strategy strategy);
Strategy parse_strategy(std::string_view tag);
Target parse_target(std::string_view tag);

struct DatasetKey {
  Strategy strategy;
  Target target;

  friend auto operator<=>(const DatasetKey&, const DatasetKey&) = default;
};

// All 12 (strategy, target) pairs, strategy-major.
std::vector<DatasetKey> all_dataset_keys();
// "adv_<strategy>_<target>.json"
std::string dataset_file_name(const DatasetKey& key);
// "pred_<strategy>_<target>.jsonl"
std::string prediction_file_name(const DatasetKey& key);

struct EntityOccurrence {
  std::string entity_id;
  Role role;
  std::string relation;
  std::string entity_type;
  Tokens surface;
  std::string source_example_id;

  friend bool operator==(const EntityOccurrence&,
                         const EntityOccurrence&) = default;
};

// Sentinel returned by masking.
struct Mask {
  friend bool operator==(const Mask&, const Mask&) = default;
};

using Replacement = std::variant<Mask, EntityOccurrence>;

class EmptyCandidateSet : public Error {
 public:
  EmptyCandidateSet(std::string example_id, Role role, Strategy strategy);

  const std::string& example_id() const { return example_id_; }
  Role role() const { return role_; }
  Strategy strategy() const { return strategy_; }

 private:
  std::string example_id_;
  Role role_;
  Strategy strategy_;
};

// Entity occurrences of a donor corpus, indexed for the three donor-based
// strategies. Occurrences are stored in corpus order (subject before object
// within an example); every index lists positions into occurrences() in
// that same order, which keeps draws reproducible.
class CandidatePool {
 public:
  CandidatePool() = default;

  std::span<const EntityOccurrence> occurrences() const { return occurrences_; }
  bool empty() const { return occurrences_.empty(); }

  std::span<const std::size_t> by_role(Role role) const;
  std::span<const std::size_t> by_role_relation(Role role,
                                                std::string_view relation) const;
  std::span<const std::size_t> by_role_type(Role role,
                                            std::string_view type) const;
  // Entity ids that fill `role` for `relation` somewhere in the pool.
  const std::vector<std::string>& role_relation_entities(
      Role role, std::string_view relation) const;
  bool fills(Role role, std::string_view relation,
             std::string_view entity_id) const;

  // Positions of the occurrences `strategy` may draw to replace `role` of
  // `ex`. Empty for masking.
  std::vector<std::size_t> candidates(const Example& ex, Role role,
                                      Strategy strategy) const;

 private:
  friend CandidatePool build_pools(const Corpus& corpus);

  using Key = std::pair<int, std::string>;
  struct KeyHash {
    std::size_t operator()(const Key& k) const {
      return std::hash<std::string>()(k.second) * 2 + k.first;
    }
  };

  std::vector<EntityOccurrence> occurrences_;
  std::vector<int> entity_index_;  // parallel to occurrences_
  std::vector<int> type_index_;    // parallel to occurrences_
  std::unordered_map<std::string, int> entity_ids_;
  std::unordered_map<std::string, int> type_ids_;
  std::array<std::vector<std::size_t>, 2> by_role_;
  std::unordered_map<Key, std::vector<std::size_t>, KeyHash> by_role_relation_;
  std::unordered_map<Key, std::vector<std::size_t>, KeyHash> by_role_type_;
  std::unordered_map<Key, std::vector<std::string>, KeyHash>
      role_relation_entities_;
  // Occurrences of a role whose entity never fills that role for the
  // keyed relation.
  std::unordered_map<Key, std::vector<std::size_t>, KeyHash> never_fills_;
};

// One occurrence per linked, typed (example, role). Examples must be fully
// linked for the strategies' id exclusions to be meaningful; unlinked or
// masked mentions are not used as donors.
CandidatePool build_pools(const Corpus& corpus);

// Deterministic RNG seeded for one (example, strategy, target, role) draw.
std::mt19937_64 draw_rng(std::uint64_t seed, std::string_view example_id,
                         Strategy strategy, Target target, Role role);

// Uniform integer in [0, n). Independent of the standard library's
// distribution implementation. Requires n > 0.
std::size_t uniform_index(std::mt19937_64& rng, std::size_t n);

// Throws EmptyCandidateSet when no donor satisfies the strategy.
Replacement select_candidate(const Example& ex, Role role, Strategy strategy,
                             const CandidatePool& pool, std::mt19937_64& rng);

struct SpanReplacement {
  Tokens tokens;
  Span span;
  Span other_span;
};

// Replaces tokens[span] with `new_surface`; `other_span` is shifted when it
// lies after `span`. Throws ContractViolation on invalid spans or an empty
// surface.
SpanReplacement replace_span(const Tokens& tokens, Span span,
                             const Tokens& new_surface, Span other_span);

struct Provenance {
  Strategy strategy;
  Target target;
  std::string original_id;
  std::optional<std::string> original_subj_link;
  std::optional<std::string> original_obj_link;
  // Entity id, "[MASK]", or empty when the role was not replaced.
  std::optional<std::string> replacement_subj;
  std::optional<std::string> replacement_obj;
  std::optional<std::string> donor_subj_example;
  std::optional<std::string> donor_obj_example;

  friend bool operator==(const Provenance&, const Provenance&) = default;
};

struct AdversarialExample {
  Example example;
  Provenance provenance;

  friend bool operator==(const AdversarialExample&,
                         const AdversarialExample&) = default;
};

// Applies a chosen replacement to one role of `ex`.
Example apply_replacement(const Example& ex, Role role,
                          const Replacement& replacement);

// Selects and applies replacements for `target` (subject first for kBoth).
// Each role draws from draw_rng(seed, ex.id, strategy, target, role).
AdversarialExample make_adversarial(const Example& ex, Strategy strategy,
                                    Target target, const CandidatePool& pool,
                                    std::uint64_t seed);

// Same, with caller-provided RNGs for the subject and object draws.
AdversarialExample make_adversarial(const Example& ex, Strategy strategy,
                                    Target target, const CandidatePool& pool,
                                    std::mt19937_64& subj_rng,
                                    std::mt19937_64& obj_rng);

enum class OnEmpty { kSkip, kFail };
OnEmpty parse_on_empty(std::string_view tag);
std::string_view tag(OnEmpty policy);

struct SkipRecord {
  std::string original_id;
  Strategy strategy;
  Target target;
  std::string reason;

  friend bool operator==(const SkipRecord&, const SkipRecord&) = default;
};

struct GenerateOptions {
  // Datasets to build; all 12 when empty.
  std::vector<DatasetKey> keys;
  // Worker threads; 0 picks the hardware concurrency.
  unsigned threads = 1;
};

struct GenerationResult {
  std::map<DatasetKey, std::vector<AdversarialExample>> datasets;
  // Ordered by dataset key, then corpus order.
  std::vector<SkipRecord> skipped;
};

// Builds every requested dataset from `corpus` using donors from `pool`.
// Under OnEmpty::kFail the first EmptyCandidateSet in (dataset, corpus)
// order is rethrown.
GenerationResult generate_datasets(const Corpus& corpus,
                                   const CandidatePool& pool,
                                   std::uint64_t seed, OnEmpty on_empty,
                                   const GenerateOptions& options = {});

// Wraps a dataset's examples as a Corpus with `labels`.
Corpus to_corpus(const std::vector<AdversarialExample>& dataset,
                 const LabelSet& labels);

nlohmann::ordered_json provenance_to_json(const AdversarialExample& adv);
std::string provenance_jsonl(const std::vector<AdversarialExample>& dataset);
std::string skip_log_jsonl(const std::vector<SkipRecord>& skipped);

}  // namespace readv

#endif  // READV_SUBSTITUTION_H_
