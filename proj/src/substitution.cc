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

#include "readv/substitution.h"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <atomic>
#include <exception>
#include <thread>
#include <utility>

namespace readv {
namespace {

constexpr std::uint64_t kFnvOffset = 0xcbf29ce484222325ULL;
constexpr std::uint64_t kFnvPrime = 0x100000001b3ULL;

std::uint64_t fnv1a(std::uint64_t h, std::string_view bytes) {
  for (unsigned char c : bytes) {
    h ^= c;
    h *= kFnvPrime;
  }
  // Field separator, so ("ab","c") and ("a","bc") hash differently.
  h ^= 0x1f;
  h *= kFnvPrime;
  return h;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

int role_slot(Role role) { return role == Role::kSubj ? 0 : 1; }

const std::optional<std::string>& link_of(const Example& ex, Role role) {
  return role == Role::kSubj ? ex.subj_link : ex.obj_link;
}

const std::string& type_of(const Example& ex, Role role) {
  return role == Role::kSubj ? ex.subj_type : ex.obj_type;
}

template <typename Map>
std::span<const std::size_t> lookup(const Map& map, Role role,
                                    std::string_view name) {
  auto it = map.find({role_slot(role), std::string(name)});
  if (it == map.end()) return {};
  return it->second;
}

}  // namespace

std::string_view tag(Role role) {
  return role == Role::kSubj ? "subj" : "obj";
}

std::string_view tag(Target target) {
  switch (target) {
    case Target::kSubjOnly: return "subj";
    case Target::kObjOnly: return "obj";
    case Target::kBoth: return "both";
  }
  return "";
}

std::string_view tag(Strategy strategy) {
  switch (strategy) {
    case Strategy::kSameRole: return "same_role";
    case Strategy::kSameType: return "same_type";
    case Strategy::kDiffType: return "diff_type";
    case Strategy::kMasking: return "masking";
  }
  return "";
}

Strategy parse_strategy(std::string_view s) {
  for (Strategy strategy : kAllStrategies) {
    if (tag(strategy) == s) return strategy;
  }
  throw Error("unknown strategy '" + std::string(s) + "'");
}

Target parse_target(std::string_view s) {
  for (Target target : kAllTargets) {
    if (tag(target) == s) return target;
  }
  throw Error("unknown target '" + std::string(s) + "'");
}

std::string_view tag(OnEmpty policy) {
  return policy == OnEmpty::kSkip ? "skip" : "fail";
}

OnEmpty parse_on_empty(std::string_view s) {
  if (s == "skip") return OnEmpty::kSkip;
  if (s == "fail") return OnEmpty::kFail;
  throw Error("unknown on-empty policy '" + std::string(s) + "'");
}

std::vector<DatasetKey> all_dataset_keys() {
  std::vector<DatasetKey> keys;
  for (Strategy s : kAllStrategies) {
    for (Target t : kAllTargets) keys.push_back({s, t});
  }
  return keys;
}

std::string dataset_file_name(const DatasetKey& key) {
  return "adv_" + std::string(tag(key.strategy)) + "_" +
         std::string(tag(key.target)) + ".json";
}

std::string prediction_file_name(const DatasetKey& key) {
  return "pred_" + std::string(tag(key.strategy)) + "_" +
         std::string(tag(key.target)) + ".jsonl";
}

EmptyCandidateSet::EmptyCandidateSet(std::string example_id, Role role,
                                     Strategy strategy)
    : Error("no " + std::string(tag(strategy)) + " candidate for the " +
            std::string(tag(role)) + " of example '" + example_id + "'"),
      example_id_(std::move(example_id)),
      role_(role),
      strategy_(strategy) {}

std::span<const std::size_t> CandidatePool::by_role(Role role) const {
  return by_role_[role_slot(role)];
}

std::span<const std::size_t> CandidatePool::by_role_relation(
    Role role, std::string_view relation) const {
  return lookup(by_role_relation_, role, relation);
}

std::span<const std::size_t> CandidatePool::by_role_type(
    Role role, std::string_view type) const {
  return lookup(by_role_type_, role, type);
}

const std::vector<std::string>& CandidatePool::role_relation_entities(
    Role role, std::string_view relation) const {
  static const std::vector<std::string> kEmpty;
  auto it = role_relation_entities_.find({role_slot(role),
                                          std::string(relation)});
  return it == role_relation_entities_.end() ? kEmpty : it->second;
}

bool CandidatePool::fills(Role role, std::string_view relation,
                          std::string_view entity_id) const {
  const auto& ids = role_relation_entities(role, relation);
  return std::find(ids.begin(), ids.end(), entity_id) != ids.end();
}

std::vector<std::size_t> CandidatePool::candidates(const Example& ex,
                                                   Role role,
                                                   Strategy strategy) const {
  if (strategy == Strategy::kMasking) return {};
  const auto& original = link_of(ex, role);
  if (!original) {
    throw ContractViolation("example '" + ex.id + "' has no " +
                            std::string(tag(role)) +
                            " link; filter the corpus before substitution");
  }
  auto entity_it = entity_ids_.find(*original);
  const int original_entity =
      entity_it == entity_ids_.end() ? -1 : entity_it->second;
  const std::string& original_type = type_of(ex, role);

  std::vector<std::size_t> out;
  switch (strategy) {
    case Strategy::kSameRole:
      for (std::size_t i : by_role_relation(role, ex.relation)) {
        if (entity_index_[i] != original_entity) out.push_back(i);
      }
      break;
    case Strategy::kSameType:
      for (std::size_t i : by_role_type(role, original_type)) {
        if (entity_index_[i] != original_entity &&
            occurrences_[i].relation != ex.relation) {
          out.push_back(i);
        }
      }
      break;
    case Strategy::kDiffType: {
      auto type_it = type_ids_.find(original_type);
      const int type = type_it == type_ids_.end() ? -1 : type_it->second;
      auto base_it = never_fills_.find({role_slot(role), ex.relation});
      std::span<const std::size_t> base =
          base_it == never_fills_.end() ? by_role(role)
                                        : std::span<const std::size_t>(
                                              base_it->second);
      for (std::size_t i : base) {
        if (type_index_[i] != type && entity_index_[i] != original_entity) {
          out.push_back(i);
        }
      }
      break;
    }
    case Strategy::kMasking:
      break;
  }
  return out;
}

CandidatePool build_pools(const Corpus& corpus) {
  CandidatePool pool;
  std::size_t unusable = 0;
  for (const Example& ex : corpus.examples()) {
    for (Role role : kAllRoles) {
      const auto& link = link_of(ex, role);
      const std::string& type = type_of(ex, role);
      if (!link || type == kNoneType) {
        ++unusable;
        continue;
      }
      const std::size_t pos = pool.occurrences_.size();
      pool.occurrences_.push_back(EntityOccurrence{
          *link, role, ex.relation, type,
          role == Role::kSubj ? ex.subj_surface() : ex.obj_surface(), ex.id});
      auto [eit, enew] = pool.entity_ids_.try_emplace(
          *link, static_cast<int>(pool.entity_ids_.size()));
      auto [tit, tnew] = pool.type_ids_.try_emplace(
          type, static_cast<int>(pool.type_ids_.size()));
      pool.entity_index_.push_back(eit->second);
      pool.type_index_.push_back(tit->second);

      const int slot = role_slot(role);
      pool.by_role_[slot].push_back(pos);
      pool.by_role_relation_[{slot, ex.relation}].push_back(pos);
      pool.by_role_type_[{slot, type}].push_back(pos);
      auto& ids = pool.role_relation_entities_[{slot, ex.relation}];
      if (std::find(ids.begin(), ids.end(), *link) == ids.end()) {
        ids.push_back(*link);
      }
    }
  }
  if (unusable > 0) {
    spdlog::debug("build_pools: {} unlinked or masked mentions not pooled",
                  unusable);
  }

  const std::size_t num_entities = pool.entity_ids_.size();
  for (const auto& [key, members] : pool.by_role_relation_) {
    std::vector<bool> fills(num_entities, false);
    for (std::size_t i : members) fills[pool.entity_index_[i]] = true;
    auto& never = pool.never_fills_[key];
    for (std::size_t i : pool.by_role_[key.first]) {
      if (!fills[pool.entity_index_[i]]) never.push_back(i);
    }
  }
  return pool;
}

std::mt19937_64 draw_rng(std::uint64_t seed, std::string_view example_id,
                         Strategy strategy, Target target, Role role) {
  std::uint64_t h = kFnvOffset;
  for (int shift = 0; shift < 64; shift += 8) {
    const char byte = static_cast<char>((seed >> shift) & 0xff);
    h ^= static_cast<unsigned char>(byte);
    h *= kFnvPrime;
  }
  h = fnv1a(h, example_id);
  h = fnv1a(h, tag(strategy));
  h = fnv1a(h, tag(target));
  h = fnv1a(h, tag(role));
  return std::mt19937_64(splitmix64(h));
}

std::size_t uniform_index(std::mt19937_64& rng, std::size_t n) {
  const std::uint64_t range = n;
  // 2^64 mod range; draws below it would bias the modulo.
  const std::uint64_t threshold = (0 - range) % range;
  for (;;) {
    const std::uint64_t x = rng();
    if (x >= threshold) return static_cast<std::size_t>(x % range);
  }
}

Replacement select_candidate(const Example& ex, Role role, Strategy strategy,
                             const CandidatePool& pool, std::mt19937_64& rng) {
  if (strategy == Strategy::kMasking) return Mask{};
  const std::vector<std::size_t> candidates =
      pool.candidates(ex, role, strategy);
  if (candidates.empty()) throw EmptyCandidateSet(ex.id, role, strategy);
  return pool.occurrences()[candidates[uniform_index(rng, candidates.size())]];
}

SpanReplacement replace_span(const Tokens& tokens, Span span,
                             const Tokens& new_surface, Span other_span) {
  const int n = static_cast<int>(tokens.size());
  auto valid = [n](const Span& s) {
    return 0 <= s.start && s.start <= s.end && s.end < n;
  };
  if (!valid(span) || !valid(other_span)) {
    throw ContractViolation("replace_span: span out of bounds");
  }
  if (span.overlaps(other_span)) {
    throw ContractViolation("replace_span: spans overlap");
  }
  if (new_surface.empty()) {
    throw ContractViolation("replace_span: empty replacement surface");
  }

  SpanReplacement out;
  out.tokens.reserve(tokens.size() - span.length() + new_surface.size());
  out.tokens.insert(out.tokens.end(), tokens.begin(),
                    tokens.begin() + span.start);
  out.tokens.insert(out.tokens.end(), new_surface.begin(), new_surface.end());
  out.tokens.insert(out.tokens.end(), tokens.begin() + span.end + 1,
                    tokens.end());

  const int surface_len = static_cast<int>(new_surface.size());
  out.span = {span.start, span.start + surface_len - 1};
  out.other_span = other_span;
  if (other_span.start > span.end) {
    const int shift = surface_len - span.length();
    out.other_span.start += shift;
    out.other_span.end += shift;
  }
  return out;
}

Example apply_replacement(const Example& ex, Role role,
                          const Replacement& replacement) {
  Tokens surface;
  std::string type;
  std::optional<std::string> link;
  if (const auto* occ = std::get_if<EntityOccurrence>(&replacement)) {
    surface = occ->surface;
    type = occ->entity_type;
    link = occ->entity_id;
  } else {
    surface = {std::string(kMaskToken)};
    type = std::string(kNoneType);
  }

  Example out = ex;
  if (role == Role::kSubj) {
    SpanReplacement r =
        replace_span(ex.tokens, ex.subj_span, surface, ex.obj_span);
    out.tokens = std::move(r.tokens);
    out.subj_span = r.span;
    out.obj_span = r.other_span;
    out.subj_type = std::move(type);
    out.subj_link = std::move(link);
  } else {
    SpanReplacement r =
        replace_span(ex.tokens, ex.obj_span, surface, ex.subj_span);
    out.tokens = std::move(r.tokens);
    out.obj_span = r.span;
    out.subj_span = r.other_span;
    out.obj_type = std::move(type);
    out.obj_link = std::move(link);
  }
  // Token-aligned annotations (POS, NER, ...) no longer line up.
  for (auto it = out.extra.begin(); it != out.extra.end();) {
    it = it.value().is_array() ? out.extra.erase(it) : std::next(it);
  }
  return out;
}

AdversarialExample make_adversarial(const Example& ex, Strategy strategy,
                                    Target target, const CandidatePool& pool,
                                    std::mt19937_64& subj_rng,
                                    std::mt19937_64& obj_rng) {
  AdversarialExample adv;
  adv.provenance.strategy = strategy;
  adv.provenance.target = target;
  adv.provenance.original_id = ex.id;
  adv.provenance.original_subj_link = ex.subj_link;
  adv.provenance.original_obj_link = ex.obj_link;

  auto record = [&](Role role, const Replacement& r) {
    std::optional<std::string> id;
    std::optional<std::string> donor;
    if (const auto* occ = std::get_if<EntityOccurrence>(&r)) {
      id = occ->entity_id;
      donor = occ->source_example_id;
    } else {
      id = std::string(kMaskToken);
    }
    if (role == Role::kSubj) {
      adv.provenance.replacement_subj = std::move(id);
      adv.provenance.donor_subj_example = std::move(donor);
    } else {
      adv.provenance.replacement_obj = std::move(id);
      adv.provenance.donor_obj_example = std::move(donor);
    }
  };

  // Both draws are taken from the original example before anything is
  // applied, so they are independent of each other.
  std::optional<Replacement> subj;
  std::optional<Replacement> obj;
  if (target != Target::kObjOnly) {
    subj = select_candidate(ex, Role::kSubj, strategy, pool, subj_rng);
  }
  if (target != Target::kSubjOnly) {
    obj = select_candidate(ex, Role::kObj, strategy, pool, obj_rng);
  }

  adv.example = ex;
  if (subj) {
    adv.example = apply_replacement(adv.example, Role::kSubj, *subj);
    record(Role::kSubj, *subj);
  }
  if (obj) {
    adv.example = apply_replacement(adv.example, Role::kObj, *obj);
    record(Role::kObj, *obj);
  }
  return adv;
}

AdversarialExample make_adversarial(const Example& ex, Strategy strategy,
                                    Target target, const CandidatePool& pool,
                                    std::uint64_t seed) {
  std::mt19937_64 subj_rng = draw_rng(seed, ex.id, strategy, target, Role::kSubj);
  std::mt19937_64 obj_rng = draw_rng(seed, ex.id, strategy, target, Role::kObj);
  return make_adversarial(ex, strategy, target, pool, subj_rng, obj_rng);
}

GenerationResult generate_datasets(const Corpus& corpus,
                                   const CandidatePool& pool,
                                   std::uint64_t seed, OnEmpty on_empty,
                                   const GenerateOptions& options) {
  const std::vector<DatasetKey> keys =
      options.keys.empty() ? all_dataset_keys() : options.keys;
  const auto& examples = corpus.examples();
  const std::size_t n = examples.size();
  const std::size_t total = keys.size() * n;

  struct Slot {
    std::optional<AdversarialExample> value;
    std::optional<std::string> empty_reason;
    std::exception_ptr error;
  };
  std::vector<Slot> slots(total);

  auto run = [&](std::size_t task) {
    const DatasetKey& key = keys[task / n];
    const Example& ex = examples[task % n];
    Slot& slot = slots[task];
    try {
      slot.value = make_adversarial(ex, key.strategy, key.target, pool, seed);
    } catch (const EmptyCandidateSet& e) {
      slot.empty_reason = e.what();
      slot.error = std::current_exception();
    } catch (...) {
      slot.error = std::current_exception();
    }
  };

  unsigned threads = options.threads == 0 ? std::thread::hardware_concurrency()
                                          : options.threads;
  threads = std::max(1u, threads);
  if (threads == 1 || total < 2) {
    for (std::size_t t = 0; t < total; ++t) run(t);
  } else {
    std::atomic<std::size_t> next{0};
    constexpr std::size_t kChunk = 64;
    std::vector<std::jthread> workers;
    workers.reserve(threads);
    for (unsigned w = 0; w < threads; ++w) {
      workers.emplace_back([&] {
        for (;;) {
          const std::size_t begin = next.fetch_add(kChunk);
          if (begin >= total) return;
          const std::size_t end = std::min(total, begin + kChunk);
          for (std::size_t t = begin; t < end; ++t) run(t);
        }
      });
    }
  }

  GenerationResult result;
  for (std::size_t k = 0; k < keys.size(); ++k) {
    auto& dataset = result.datasets[keys[k]];
    for (std::size_t i = 0; i < n; ++i) {
      Slot& slot = slots[k * n + i];
      if (slot.value) {
        dataset.push_back(std::move(*slot.value));
        continue;
      }
      if (!slot.empty_reason || on_empty == OnEmpty::kFail) {
        std::rethrow_exception(slot.error);
      }
      result.skipped.push_back({examples[i].id, keys[k].strategy,
                                keys[k].target, *slot.empty_reason});
    }
  }
  if (!result.skipped.empty()) {
    spdlog::debug("generate: skipped {} (example, dataset) pairs with no "
                 "candidates", result.skipped.size());
  }
  return result;
}

Corpus to_corpus(const std::vector<AdversarialExample>& dataset,
                 const LabelSet& labels) {
  std::vector<Example> examples;
  examples.reserve(dataset.size());
  for (const AdversarialExample& adv : dataset) examples.push_back(adv.example);
  return Corpus(std::move(examples), labels);
}

nlohmann::ordered_json provenance_to_json(const AdversarialExample& adv) {
  auto opt = [](const std::optional<std::string>& v) {
    return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
  };
  const Provenance& p = adv.provenance;
  nlohmann::ordered_json j = nlohmann::ordered_json::object();
  j["id"] = adv.example.id;
  j["strategy"] = tag(p.strategy);
  j["target"] = tag(p.target);
  j["original_id"] = p.original_id;
  j["replacement_subj"] = opt(p.replacement_subj);
  j["replacement_obj"] = opt(p.replacement_obj);
  j["donor_subj_example"] = opt(p.donor_subj_example);
  j["donor_obj_example"] = opt(p.donor_obj_example);
  return j;
}

std::string provenance_jsonl(const std::vector<AdversarialExample>& dataset) {
  std::string out;
  for (const AdversarialExample& adv : dataset) {
    out += provenance_to_json(adv).dump();
    out += '\n';
  }
  return out;
}

std::string skip_log_jsonl(const std::vector<SkipRecord>& skipped) {
  std::string out;
  for (const SkipRecord& s : skipped) {
    nlohmann::ordered_json j = nlohmann::ordered_json::object();
    j["original_id"] = s.original_id;
    j["strategy"] = tag(s.strategy);
    j["target"] = tag(s.target);
    j["reason"] = s.reason;
    out += j.dump();
    out += '\n';
  }
  return out;
}

}  // namespace readv
