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

// Acceptance checks for the readv library. Prints one PASS/FAIL line per
// criterion and exits non-zero when any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include <fmt/format.h>

#include "readv/analysis.h"
#include "readv/corpus.h"
#include "readv/io.h"
#include "readv/scoring.h"
#include "readv/substitution.h"
#include "test_util.h"

namespace readv {
namespace {

using testing::context_of;
using testing::labelled_corpus;
using testing::predictions_from;

constexpr double kHandTolerance = 1e-9;
constexpr double kParityTolerance = 1e-6;
constexpr double kScorerBudgetSeconds = 5.0;
constexpr double kSubstitutionBudgetSeconds = 30.0;
constexpr int kScorerFixtures = 1000;
constexpr int kSubstitutionCorpora = 60;
constexpr int kExhaustionDraws = 10000;
constexpr int kRoundTripCorpora = 100;
constexpr std::size_t kTacredTest = 15509;
constexpr std::size_t kTacredLinked = 6277;
constexpr std::size_t kTacredRemoved = 9232;

// Thrown by require() to end a criterion with a reason.
struct Failure {
  std::string what;
};

void require(bool ok, const std::string& what) {
  if (!ok) throw Failure{what};
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
      .count();
}

enum class Outcome { kPass, kFail, kSkip };

struct Result {
  Outcome outcome;
  std::string detail;
};

Result pass(std::string detail) { return {Outcome::kPass, std::move(detail)}; }

// ---------------------------------------------------------------------------

Result scorer_oracle() {
  const auto start = std::chrono::steady_clock::now();
  std::mt19937_64 rng(20240601);
  for (int trial = 0; trial < kScorerFixtures; ++trial) {
    const int n = std::uniform_int_distribution<int>(0, 20)(rng);
    const int k = std::uniform_int_distribution<int>(1, 4)(rng);
    const LabelSet labels = testing::synthetic_labels(k - 1);
    const std::vector<std::string> pool(labels.begin(), labels.end());
    std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
    std::vector<std::string> g(n), p(n);
    for (int i = 0; i < n; ++i) {
      g[i] = pool[pick(rng)];
      p[i] = pool[pick(rng)];
    }
    const Corpus gold = labelled_corpus(g, labels);
    const ScoreReport r = score(gold, predictions_from(gold, p));
    const ScoreCounts oc = testing::oracle_counts(g, p);
    require(r.counts == oc, fmt::format("counts differ on fixture {}", trial));
    const double op =
        oc.pred_positive == 0 ? 1.0 : double(oc.correct) / double(oc.pred_positive);
    const double orr =
        oc.gold_positive == 0 ? 0.0 : double(oc.correct) / double(oc.gold_positive);
    const double of = op + orr == 0.0 ? 0.0 : 2 * op * orr / (op + orr);
    require(r.precision == op && r.recall == orr && r.f1 == of,
            fmt::format("P/R/F1 differ on fixture {}", trial));
  }

  const LabelSet labels = {"per:title", "org:founded_by", "no_relation"};
  const Corpus hand = labelled_corpus(
      {"per:title", "per:title", "org:founded_by", "no_relation", "no_relation",
       "no_relation"},
      labels);
  const ScoreReport r = score(
      hand, predictions_from(hand, {"per:title", "org:founded_by",
                                    "org:founded_by", "no_relation",
                                    "per:title", "no_relation"}));
  require(std::abs(r.precision - 0.5) < kHandTolerance, "hand fixture P");
  require(std::abs(r.recall - 2.0 / 3.0) < kHandTolerance, "hand fixture R");
  require(std::abs(r.f1 - 4.0 / 7.0) < kHandTolerance, "hand fixture F1");

  const double elapsed = seconds_since(start);
  require(elapsed < kScorerBudgetSeconds,
          fmt::format("took {:.2f}s", elapsed));
  return pass(fmt::format("{} fixtures + hand fixture, {:.2f}s",
                          kScorerFixtures, elapsed));
}

Result scorer_parity() {
  const auto fixtures = nlohmann::json::parse(
      read_file(std::string(READV_TEST_DATA_DIR) + "/golden/scorer_parity.json"));
  require(fixtures.size() >= 10, "fewer than 10 golden fixtures");
  for (const auto& f : fixtures) {
    const std::string name = f.at("name").get<std::string>();
    const auto g = f.at("gold").get<std::vector<std::string>>();
    const auto p = f.at("pred").get<std::vector<std::string>>();
    LabelSet labels(g.begin(), g.end());
    labels.insert(p.begin(), p.end());
    labels.insert(std::string(kNoRelation));
    const Corpus gold = labelled_corpus(g, labels);
    const ScoreReport r = score(gold, predictions_from(gold, p));
    require(std::abs(r.precision - f.at("precision").get<double>()) <
                    kParityTolerance &&
                std::abs(r.recall - f.at("recall").get<double>()) <
                    kParityTolerance &&
                std::abs(r.f1 - f.at("f1").get<double>()) < kParityTolerance,
            "mismatch on " + name);
  }
  return pass(fmt::format("{} golden fixtures", fixtures.size()));
}

// ---------------------------------------------------------------------------

// Direct scans of the corpus used to check each drawn replacement.
struct Oracle {
  const Corpus& corpus;

  const std::optional<std::string>& link(const Example& ex, Role r) const {
    return r == Role::kSubj ? ex.subj_link : ex.obj_link;
  }
  const std::string& type(const Example& ex, Role r) const {
    return r == Role::kSubj ? ex.subj_type : ex.obj_type;
  }
  Tokens surface(const Example& ex, Role r) const {
    const Span s = r == Role::kSubj ? ex.subj_span : ex.obj_span;
    return Tokens(ex.tokens.begin() + s.start, ex.tokens.begin() + s.end + 1);
  }

  bool ever_fills(Role r, const std::string& relation,
                  const std::string& entity) const {
    for (const Example& ex : corpus.examples()) {
      if (ex.relation == relation && link(ex, r) == entity) return true;
    }
    return false;
  }

  // Entity ids the strategy may choose for role `r` of `ex`.
  std::set<std::string> allowed(const Example& ex, Role r, Strategy s) const {
    std::set<std::string> out;
    for (const Example& d : corpus.examples()) {
      const auto& id = link(d, r);
      if (!id || *id == *link(ex, r) || type(d, r) == kNoneType) continue;
      bool ok = false;
      switch (s) {
        case Strategy::kSameRole:
          ok = d.relation == ex.relation;
          break;
        case Strategy::kSameType:
          ok = d.relation != ex.relation && type(d, r) == type(ex, r);
          break;
        case Strategy::kDiffType:
          ok = type(d, r) != type(ex, r) && !ever_fills(r, ex.relation, *id);
          break;
        case Strategy::kMasking:
          break;
      }
      if (ok) out.insert(*id);
    }
    return out;
  }
};

void check_role(const Oracle& oracle, const Example& orig, const Example& adv,
                Role r, Strategy s, const std::optional<std::string>& replacement,
                const std::optional<std::string>& donor) {
  require(replacement.has_value(), orig.id + ": no replacement recorded");
  if (s == Strategy::kMasking) {
    require(*replacement == kMaskToken, orig.id + ": masking replacement");
    require(oracle.surface(adv, r) == Tokens{std::string(kMaskToken)} &&
                oracle.type(adv, r) == kNoneType && !oracle.link(adv, r),
            orig.id + ": masked mention");
    return;
  }
  require(*replacement != *oracle.link(orig, r), orig.id + ": identity replacement");
  require(oracle.allowed(orig, r, s).contains(*replacement),
          fmt::format("{}: {} violates {}", orig.id, *replacement, tag(s)));
  require(oracle.link(adv, r) == replacement, orig.id + ": link not updated");
  require(donor.has_value(), orig.id + ": donor missing");
  const Example* d = oracle.corpus.find(*donor);
  require(d != nullptr && oracle.link(*d, r) == replacement,
          orig.id + ": donor mismatch");
  require(oracle.surface(adv, r) == oracle.surface(*d, r) &&
              oracle.type(adv, r) == oracle.type(*d, r),
          orig.id + ": surface or type not taken from the donor");
}

void check_dataset(const Corpus& corpus, const DatasetKey& key,
                   const std::vector<AdversarialExample>& dataset) {
  const Oracle oracle{corpus};
  for (const AdversarialExample& a : dataset) {
    const Example* orig = corpus.find(a.provenance.original_id);
    require(orig != nullptr, "unknown original " + a.provenance.original_id);
    require(a.example.id == orig->id, orig->id + ": id changed");
    require(a.example.relation == orig->relation, orig->id + ": label changed");
    require(context_of(a.example) == context_of(*orig),
            orig->id + ": context changed");
    validate_example(a.example, corpus.label_set());
    const bool subj = key.target != Target::kObjOnly;
    const bool obj = key.target != Target::kSubjOnly;
    if (subj) {
      check_role(oracle, *orig, a.example, Role::kSubj, key.strategy,
                 a.provenance.replacement_subj, a.provenance.donor_subj_example);
    } else {
      require(oracle.surface(a.example, Role::kSubj) ==
                      oracle.surface(*orig, Role::kSubj) &&
                  a.example.subj_link == orig->subj_link,
              orig->id + ": untargeted subject changed");
    }
    if (obj) {
      check_role(oracle, *orig, a.example, Role::kObj, key.strategy,
                 a.provenance.replacement_obj, a.provenance.donor_obj_example);
    } else {
      require(oracle.surface(a.example, Role::kObj) ==
                      oracle.surface(*orig, Role::kObj) &&
                  a.example.obj_link == orig->obj_link,
              orig->id + ": untargeted object changed");
    }
  }
}

std::string serialize(const GenerationResult& r, const LabelSet& labels) {
  std::string out;
  for (const auto& [key, d] : r.datasets) {
    out += dataset_file_name(key) + "\n" + corpus_to_json(to_corpus(d, labels)) +
           provenance_jsonl(d);
  }
  return out + skip_log_jsonl(r.skipped);
}

void diff_type_exhaustion() {
  // Subjects of per:employee_of are PERSON Q1..Q3; the same entities also
  // fill other relations, which must not make them eligible.
  std::vector<Example> ex;
  auto add = [&](std::string id, std::string st, std::string ot,
                 std::string rel, std::string sl, std::string ol) {
    ex.push_back(testing::make_example(std::move(id), {"S", "r", "O"}, {0, 0},
                                       {2, 2}, std::move(st), std::move(ot),
                                       std::move(rel), std::move(sl),
                                       std::move(ol)));
  };
  add("a", "ORGANIZATION", "PERSON", "per:employee_of", "Q100", "Q200");
  for (int i = 1; i <= 3; ++i) {
    const std::string q = "Q" + std::to_string(i);
    add("emp" + q, "PERSON", "ORGANIZATION", "per:employee_of", q, "Q201");
    add("sp" + q, "PERSON", "PERSON", "per:spouse", q, "Q20" + std::to_string(i + 1));
  }
  for (int i = 4; i <= 9; ++i) {
    const std::string q = "Q" + std::to_string(i);
    add("o" + q, i % 2 ? "CITY" : "PERSON", "DATE", "per:date_of_birth", q,
        "Q30" + std::to_string(i));
  }
  const Corpus corpus(ex, tacred_labels());
  const CandidatePool pool = build_pools(corpus);
  const Oracle oracle{corpus};
  const Example& target = corpus.examples()[0];
  const std::set<std::string> expected =
      oracle.allowed(target, Role::kSubj, Strategy::kDiffType);
  require(expected.size() == 6, "exhaustion fixture is malformed");
  std::set<std::string> seen;
  std::mt19937_64 rng(1);
  for (int i = 0; i < kExhaustionDraws; ++i) {
    const Replacement r = select_candidate(target, Role::kSubj,
                                           Strategy::kDiffType, pool, rng);
    const std::string& id = std::get<EntityOccurrence>(r).entity_id;
    require(!oracle.ever_fills(Role::kSubj, "per:employee_of", id),
            "diff_type drew " + id);
    seen.insert(id);
  }
  require(seen == expected, "diff_type draws did not cover the candidate set");
}

Result substitution_invariants() {
  const auto start = std::chrono::steady_clock::now();
  std::mt19937_64 rng(77);
  std::size_t checked = 0;
  for (int trial = 0; trial < kSubstitutionCorpora; ++trial) {
    testing::RandomCorpusSpec spec;
    spec.min_examples = 5;
    spec.max_examples = 60;
    spec.num_entities = 4 + static_cast<int>(rng() % 20);
    spec.num_types = 1 + static_cast<int>(rng() % 4);
    spec.num_relations = 1 + static_cast<int>(rng() % 5);
    spec.extras = trial % 2 == 0;
    const Corpus corpus = testing::random_corpus(rng, spec);
    const CandidatePool pool = build_pools(corpus);
    const std::uint64_t seed = rng();

    GenerateOptions serial;
    GenerateOptions parallel;
    parallel.threads = 8;
    const GenerationResult a =
        generate_datasets(corpus, pool, seed, OnEmpty::kSkip, serial);
    const GenerationResult b =
        generate_datasets(corpus, pool, seed, OnEmpty::kSkip, parallel);
    require(serialize(a, corpus.label_set()) == serialize(b, corpus.label_set()),
            fmt::format("corpus {}: output differs between 1 and 8 threads", trial));

    for (const auto& [key, dataset] : a.datasets) {
      check_dataset(corpus, key, dataset);
      checked += dataset.size();
    }
    // Every skip is a genuinely empty candidate set.
    const Oracle oracle{corpus};
    for (const SkipRecord& s : a.skipped) {
      const Example& ex = *corpus.find(s.original_id);
      const bool subj_empty = s.target != Target::kObjOnly &&
                              oracle.allowed(ex, Role::kSubj, s.strategy).empty();
      const bool obj_empty = s.target != Target::kSubjOnly &&
                             oracle.allowed(ex, Role::kObj, s.strategy).empty();
      require(subj_empty || obj_empty, "spurious skip of " + s.original_id);
    }
  }
  diff_type_exhaustion();

  const double elapsed = seconds_since(start);
  require(elapsed < kSubstitutionBudgetSeconds,
          fmt::format("took {:.2f}s", elapsed));
  return pass(fmt::format("{} corpora, {} adversarial examples, {} diff_type "
                          "draws, {:.2f}s",
                          kSubstitutionCorpora, checked, kExhaustionDraws,
                          elapsed));
}

Result cardinality() {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 30; ++trial) {
    testing::RandomCorpusSpec spec;
    spec.num_entities = 2 + static_cast<int>(rng() % 10);
    const Corpus corpus = testing::random_corpus(rng, spec);
    const GenerationResult r =
        generate_datasets(corpus, build_pools(corpus), trial, OnEmpty::kSkip);
    require(r.datasets.size() == 12, fmt::format("corpus {}: {} datasets", trial,
                                                 r.datasets.size()));
    for (Target t : kAllTargets) {
      require(r.datasets.at({Strategy::kMasking, t}).size() == corpus.size(),
              fmt::format("corpus {}: masking cardinality", trial));
    }
  }
  const Corpus gallery = testing::gallery_corpus();
  const GenerationResult r =
      generate_datasets(gallery, build_pools(gallery), 0, OnEmpty::kSkip);
  require(r.datasets.size() == 12, "gallery dataset count");
  require(r.datasets.at({Strategy::kMasking, Target::kBoth}).size() == 5,
          "gallery masking cardinality");
  const GenerationResult empty =
      generate_datasets(Corpus{}, CandidatePool{}, 0, OnEmpty::kSkip);
  require(empty.datasets.size() == 12, "empty corpus dataset count");
  return pass("31 fixtures plus the empty corpus");
}

// ---------------------------------------------------------------------------

Example typed(std::string id, std::string st, std::string ot, std::string rel) {
  return testing::make_example(std::move(id), {"A", "x", "B"}, {0, 0}, {2, 2},
                               std::move(st), std::move(ot), std::move(rel));
}

Result analysis_fixtures() {
  // Drift: 4 gold vs 6 predicted no_relation over 10 examples.
  {
    std::vector<std::string> gold(10, "per:title"), pred(10, "per:title");
    for (int i = 0; i < 4; ++i) gold[i] = "no_relation";
    for (int i = 0; i < 6; ++i) pred[i] = "no_relation";
    const Corpus g = labelled_corpus(gold, {"per:title", "no_relation"});
    require(std::abs(no_relation_drift(g, predictions_from(g, pred)) - 20.0) < 1e-12,
            "drift fixture");
  }
  // Adherence: one of four predictions respects the observed type pairs.
  {
    const TypeConstraintTable table = build_constraint_table(Corpus(
        {typed("t1", "PERSON", "ORGANIZATION", "per:employee_of"),
         typed("t2", "PERSON", "CITY", "per:city_of_birth")},
        tacred_labels()));
    const Corpus adv({typed("a", "PERSON", "ORGANIZATION", "per:employee_of"),
                      typed("b", "PERSON", "CITY", "per:employee_of"),
                      typed("c", "NONE", "NONE", "per:employee_of"),
                      typed("d", "PERSON", "DATE", "per:employee_of")},
                     tacred_labels());
    const AdherenceReport r = adherence(
        adv, predictions_from(adv, {"per:employee_of", "per:employee_of",
                                    "per:city_of_birth", "per:title"}),
        table);
    require(r.adherent == 1 && r.total == 4, "adherence fixture");
  }
  const ConfusableSets sets = ConfusableSets::defaults();
  // Flow: three changed predictions, two of them within the group.
  {
    const Corpus gold = labelled_corpus(
        {"per:city_of_birth", "per:city_of_birth", "per:origin",
         "per:country_of_birth", "per:title"},
        tacred_labels());
    const PredictionSet before = predictions_from(
        gold, {"per:city_of_birth", "per:city_of_birth", "per:origin",
               "per:country_of_birth", "per:title"});
    const PredictionSet after = predictions_from(
        gold, {"per:origin", "per:city_of_birth", "per:country_of_birth",
               "no_relation", "per:city_of_birth"});
    const FlowMatrix f = confusable_flow(before, after, gold, sets, "birth");
    std::size_t mass = 0;
    for (std::size_t i = 0; i < f.labels.size(); ++i) mass += f.row_sum(i);
    require(f.analyzed == 4 && mass == 4, "flow mass conservation");
    require(f.changed == 3 && f.in_set_changes == 2, "flow change counts");
    require(std::abs(*f.in_set_percent() - 200.0 / 3.0) < 1e-12,
            "flow in-set percent");
  }
  // Jaccard: {the, lives, in} vs {the, works, in} = 0.5.
  {
    const Corpus c(
        {testing::make_example("j1", {"X", "the", "lives", "in", "Y"}, {0, 0},
                               {4, 4}, "PERSON", "CITY",
                               "per:cities_of_residence"),
         testing::make_example("j2", {"X", "The", "works", "in", "Y"}, {0, 0},
                               {4, 4}, "PERSON", "COUNTRY",
                               "per:countries_of_residence")},
        tacred_labels());
    const JaccardMatrix m = jaccard_groups(c, sets)[0];
    require(*m.values[0][1] == 0.5 && *m.values[1][0] == 0.5,
            "jaccard off-diagonal");
    require(*m.values[0][0] == 1.0 && *m.values[1][1] == 1.0,
            "jaccard diagonal");
    require(!m.values[2][2].has_value(), "jaccard undefined for empty relation");
  }
  // Critical generation: 1 of 20 diff_type outputs lands on a sibling's
  // type pair.
  {
    const TypeConstraintTable table = build_constraint_table(Corpus(
        {typed("t1", "PERSON", "COUNTRY", "per:countries_of_residence"),
         typed("t2", "PERSON", "CITY", "per:cities_of_residence")},
        tacred_labels()));
    std::vector<Example> adv;
    for (int i = 0; i < 20; ++i) {
      adv.push_back(typed("c" + std::to_string(i), "PERSON",
                          i == 0 ? "CITY" : "DATE", "per:countries_of_residence"));
    }
    const auto rates =
        critical_generation_rate(Corpus(adv, tacred_labels()), sets, table);
    const CriticalRate& r = rates.at("per:countries_of_residence");
    require(r.critical == 1 && r.generated == 20 && r.percent() == 5.0,
            "critical rate fixture");
  }
  return pass("drift, adherence, flow, jaccard, critical");
}

Result tacred_counts() {
  const char* test = std::getenv("READV_TACRED_TEST");
  const char* links = std::getenv("READV_TACRED_LINKS");
  if (test == nullptr || links == nullptr) {
    return {Outcome::kSkip,
            "set READV_TACRED_TEST and READV_TACRED_LINKS to run"};
  }
  const Corpus all = load_corpus(test, std::string(links));
  require(all.size() == kTacredTest, fmt::format("loaded {}", all.size()));
  const Corpus linked = filter_linked(all);
  require(linked.size() == kTacredLinked,
          fmt::format("kept {}", linked.size()));
  require(all.size() - linked.size() == kTacredRemoved,
          fmt::format("removed {}", all.size() - linked.size()));
  return pass(fmt::format("{} loaded, {} linked", all.size(), linked.size()));
}

Result round_trip() {
  std::mt19937_64 rng(100);
  for (int trial = 0; trial < kRoundTripCorpora; ++trial) {
    testing::RandomCorpusSpec spec;
    spec.min_examples = 0;
    spec.linked = trial % 3 != 0;
    spec.extras = trial % 2 == 0;
    const Corpus c = testing::random_corpus(rng, spec);
    const Corpus back = parse_corpus(corpus_to_json(c), std::nullopt,
                                     LoadOptions{c.label_set(), false});
    require(back == c, fmt::format("corpus {} differs after round trip", trial));
    for (std::size_t i = 0; i < c.size(); ++i) {
      require(back.examples()[i].extra == c.examples()[i].extra,
              fmt::format("corpus {}: extras differ", trial));
    }
  }
  return pass(fmt::format("{} corpora", kRoundTripCorpora));
}

int run() {
  const std::vector<std::pair<std::string, std::function<Result()>>> criteria = {
      {"scorer oracle equivalence", scorer_oracle},
      {"scorer parity with the official script", scorer_parity},
      {"substitution invariants", substitution_invariants},
      {"cardinality", cardinality},
      {"analysis correctness", analysis_fixtures},
      {"TACRED ingestion counts", tacred_counts},
      {"write/load round trip", round_trip},
  };
  int failures = 0;
  for (const auto& [name, check] : criteria) {
    Result r;
    try {
      r = check();
    } catch (const Failure& f) {
      r = {Outcome::kFail, f.what};
    } catch (const std::exception& e) {
      r = {Outcome::kFail, std::string("exception: ") + e.what()};
    }
    const char* label = r.outcome == Outcome::kPass   ? "PASS"
                        : r.outcome == Outcome::kSkip ? "SKIP"
                                                      : "FAIL";
    if (r.outcome == Outcome::kFail) ++failures;
    std::cout << fmt::format("[{}] {}: {}\n", label, name, r.detail);
  }
  std::cout << fmt::format("{} criteria, {} failed\n", criteria.size(), failures);
  return failures == 0 ? 0 : 1;
}

}  // namespace
}  // namespace readv

int main() { return readv::run(); }
