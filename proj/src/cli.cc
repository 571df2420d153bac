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

#include "readv/cli.h"

#include <fmt/format.h>
#include <spdlog/spdlog.h>
#include <spdlog/sinks/stdout_color_sinks.h>

#include <iostream>
#include <map>
#include <memory>
#include <utility>

#include "CLI11.hpp"
#include "readv/corpus.h"
#include "readv/errors.h"
#include "readv/io.h"
#include "readv/plot.h"
#include "readv/scoring.h"

namespace readv {
namespace {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

constexpr std::string_view kStdFile = "std.json";
constexpr std::string_view kStdPredFile = "pred_std.jsonl";
constexpr std::string_view kManifestFile = "manifest.json";
constexpr std::string_view kSkipLogFile = "skip_log.jsonl";

std::string provenance_file_name(const DatasetKey& key) {
  return "provenance_" + std::string(tag(key.strategy)) + "_" +
         std::string(tag(key.target)) + ".jsonl";
}

std::string cell_name(const DatasetKey& key) {
  return std::string(tag(key.strategy)) + "_" + std::string(tag(key.target));
}

LoadOptions load_options(const std::string& labels) {
  LoadOptions options;
  if (labels == "tacred") return options;
  if (labels == "inferred") {
    options.infer_labels = true;
    return options;
  }
  const nlohmann::json doc = nlohmann::json::parse(read_file(labels));
  if (!doc.is_array()) throw ParseError(labels + ": expected a JSON array");
  options.labels = doc.get<LabelSet>();
  return options;
}

// `data` (+ links), reduced to fully linked examples when links are given.
Corpus load_input(const fs::path& data, const std::optional<fs::path>& links,
                  const LoadOptions& options) {
  Corpus corpus = load_corpus(data, links, options);
  if (!links) return corpus;
  Corpus filtered = filter_linked(corpus);
  spdlog::info("{}: kept {} of {} examples with both arguments linked",
               data.string(), filtered.size(), corpus.size());
  return filtered;
}

fs::path gold_dir(const RunConfig& config) {
  return config.gold_dir.value_or(config.out_dir);
}

ordered_json file_entry(const fs::path& path) {
  return {{"path", path.string()}, {"sha256", sha256_hex(read_file(path))}};
}

template <typename T>
ordered_json per_cell(const std::vector<DatasetKey>& keys,
                      const std::map<DatasetKey, T>& values,
                      const std::function<ordered_json(const T&)>& to_json) {
  ordered_json cells = ordered_json::object();
  for (Strategy s : kAllStrategies) {
    ordered_json row = ordered_json::object();
    for (Target t : kAllTargets) {
      const DatasetKey key{s, t};
      if (std::find(keys.begin(), keys.end(), key) == keys.end()) continue;
      auto it = values.find(key);
      row[std::string(tag(t))] =
          it == values.end() ? ordered_json(nullptr) : to_json(it->second);
    }
    if (!row.empty()) cells[std::string(tag(s))] = std::move(row);
  }
  return cells;
}

// Applies a previous run's manifest: settings come from it, inputs must
// still hash the same.
void apply_manifest(RunConfig& config) {
  const fs::path path = *config.manifest;
  const ordered_json m = ordered_json::parse(read_file(path));
  config.seed = m.at("seed").get<std::uint64_t>();
  config.on_empty = parse_on_empty(m.at("on_empty").get<std::string>());
  config.labels = m.at("labels").get<std::string>();
  config.strategies.clear();
  for (const auto& s : m.at("strategies")) {
    config.strategies.push_back(parse_strategy(s.get<std::string>()));
  }
  config.targets.clear();
  for (const auto& t : m.at("targets")) {
    config.targets.push_back(parse_target(t.get<std::string>()));
  }
  const ordered_json& inputs = m.at("inputs");
  auto restore = [&](const char* name, std::optional<fs::path>& slot) {
    auto it = inputs.find(name);
    if (it == inputs.end()) return;
    if (!slot) slot = fs::path(it->at("path").get<std::string>());
    const std::string expected = it->at("sha256").get<std::string>();
    if (sha256_hex(read_file(*slot)) != expected) {
      throw Error("input '" + slot->string() + "' does not match the " +
                  std::string(name) + " hash recorded in " + path.string());
    }
  };
  restore("data", config.data);
  restore("links", config.links);
  restore("donors", config.donors);
  restore("donor_links", config.donor_links);
}

int guarded(const char* name, const std::function<int()>& body) {
  try {
    return body();
  } catch (const std::exception& e) {
    spdlog::error("{}: {}", name, e.what());
    return 1;
  }
}

int generate(RunConfig config) {
  if (config.manifest) apply_manifest(config);
  if (!config.data) throw Error("--data is required");
  if (!config.seed) throw Error("--seed is required for generate");

  const LoadOptions options = load_options(config.labels);
  const Corpus corpus = load_input(*config.data, config.links, options);
  std::optional<Corpus> donors;
  if (config.donors) {
    donors = load_input(*config.donors, config.donor_links, options);
  }
  const CandidatePool pool = build_pools(donors ? *donors : corpus);

  GenerateOptions gen;
  gen.keys = selected_keys(config);
  gen.threads = config.threads;
  const GenerationResult result =
      generate_datasets(corpus, pool, *config.seed, config.on_empty, gen);

  const fs::path out = config.out_dir;
  fs::create_directories(out);
  ordered_json outputs = ordered_json::object();
  ordered_json sizes = ordered_json::object();
  auto emit = [&](const std::string& name, const std::string& contents) {
    write_file_atomic(out / name, contents);
    outputs[name] = sha256_hex(contents);
  };

  emit(std::string(kStdFile), corpus_to_json(corpus));
  for (const auto& [key, dataset] : result.datasets) {
    emit(dataset_file_name(key),
         corpus_to_json(to_corpus(dataset, corpus.label_set())));
    emit(provenance_file_name(key), provenance_jsonl(dataset));
    sizes[dataset_file_name(key)] = dataset.size();
  }
  emit(std::string(kSkipLogFile), skip_log_jsonl(result.skipped));

  ordered_json manifest = ordered_json::object();
  manifest["tool"] = "readv";
  manifest["version"] = kToolVersion;
  manifest["seed"] = *config.seed;
  manifest["on_empty"] = tag(config.on_empty);
  manifest["labels"] = config.labels;
  ordered_json strategies = ordered_json::array();
  ordered_json targets = ordered_json::array();
  for (const auto& key : gen.keys) {
    if (std::find(strategies.begin(), strategies.end(), tag(key.strategy)) ==
        strategies.end()) {
      strategies.push_back(tag(key.strategy));
    }
    if (std::find(targets.begin(), targets.end(), tag(key.target)) ==
        targets.end()) {
      targets.push_back(tag(key.target));
    }
  }
  manifest["strategies"] = strategies;
  manifest["targets"] = targets;
  ordered_json inputs = ordered_json::object();
  inputs["data"] = file_entry(*config.data);
  if (config.links) inputs["links"] = file_entry(*config.links);
  if (config.donors) inputs["donors"] = file_entry(*config.donors);
  if (config.donor_links) inputs["donor_links"] = file_entry(*config.donor_links);
  manifest["inputs"] = inputs;
  manifest["counts"] = {{"corpus", corpus.size()},
                        {"pool_occurrences", pool.occurrences().size()},
                        {"skipped", result.skipped.size()},
                        {"datasets", sizes}};
  manifest["outputs"] = outputs;
  write_file_atomic(out / kManifestFile, manifest.dump(2) + "\n");

  std::cout << fmt::format("{:<28} {:>8}\n", "dataset", "examples");
  std::cout << fmt::format("{:<28} {:>8}\n", kStdFile, corpus.size());
  for (const auto& [key, dataset] : result.datasets) {
    std::cout << fmt::format("{:<28} {:>8}\n", dataset_file_name(key),
                             dataset.size());
  }
  std::cout << fmt::format("{:<28} {:>8}\n", "skipped", result.skipped.size());
  return 0;
}

struct Baseline {
  Corpus gold;
  std::optional<PredictionSet> preds;
};

Baseline load_baseline(const RunConfig& config, const LoadOptions& options,
                       bool require_preds) {
  const fs::path std_path = gold_dir(config) / kStdFile;
  Baseline b;
  if (fs::exists(std_path)) {
    b.gold = load_corpus(std_path, std::nullopt, options);
  } else if (config.data) {
    b.gold = load_input(*config.data, config.links, options);
  } else {
    throw Error("no baseline corpus: " + std_path.string() +
                " is missing and --data was not given");
  }
  if (!config.preds_dir) {
    if (require_preds) throw Error("--preds-dir is required");
    return b;
  }
  const fs::path pred_path = *config.preds_dir / kStdPredFile;
  if (fs::exists(pred_path)) {
    try {
      b.preds = load_predictions(pred_path, b.gold);
    } catch (const Error& e) {
      throw Error("cell std: " + std::string(e.what()));
    }
  } else if (require_preds) {
    throw Error("cell std: missing " + pred_path.string());
  }
  return b;
}

struct Cell {
  Corpus gold;
  std::optional<PredictionSet> preds;
};

// Generated datasets of the selected keys, with predictions where present.
std::map<DatasetKey, Cell> load_cells(const RunConfig& config,
                                      const LoadOptions& options,
                                      bool need_gold_for_every_key) {
  std::map<DatasetKey, Cell> cells;
  for (const DatasetKey& key : selected_keys(config)) {
    const fs::path gold_path = gold_dir(config) / dataset_file_name(key);
    const std::optional<fs::path> pred_path =
        config.preds_dir ? std::optional(*config.preds_dir /
                                         prediction_file_name(key))
                         : std::nullopt;
    const bool have_preds = pred_path && fs::exists(*pred_path);
    if (!fs::exists(gold_path)) {
      if (have_preds || need_gold_for_every_key) {
        throw Error("cell " + cell_name(key) + ": missing " +
                    gold_path.string());
      }
      continue;
    }
    try {
      Cell cell{load_corpus(gold_path, std::nullopt, options), std::nullopt};
      if (have_preds) cell.preds = load_predictions(*pred_path, cell.gold);
      cells.emplace(key, std::move(cell));
    } catch (const Error& e) {
      throw Error("cell " + cell_name(key) + ": " + e.what());
    }
  }
  return cells;
}

int score_cmd(const RunConfig& config) {
  const LoadOptions options = load_options(config.labels);
  const Baseline baseline = load_baseline(config, options, true);
  const std::map<DatasetKey, Cell> cells = load_cells(config, options, false);

  std::map<DatasetKey, ScoredDataset> scored;
  for (const auto& [key, cell] : cells) {
    if (cell.preds) {
      scored[key] = {&cell.gold, &*cell.preds};
    } else {
      spdlog::warn("cell {}: no predictions, reported as a gap",
                   cell_name(key));
    }
  }
  const SuiteResult suite =
      score_suite(scored, {&baseline.gold, &*baseline.preds});
  const std::string table = suite_to_table(suite, config.model_name);
  write_file_atomic(config.out_dir / "score_report.json",
                    suite_to_json(suite).dump(2) + "\n");
  write_file_atomic(config.out_dir / "score_table.txt", table);
  std::cout << table;
  return 0;
}

void write_report(const RunConfig& config, std::string_view name,
                  const ordered_json& report) {
  write_file_atomic(config.out_dir / name, report.dump(2) + "\n");
}

int analyze_cmd(const RunConfig& config) {
  const AnalysisToggles& on = config.analyses;
  if (!on.any()) {
    spdlog::info("analyze: no analyses enabled");
    return 0;
  }
  const LoadOptions options = load_options(config.labels);
  const std::vector<DatasetKey> keys = selected_keys(config);
  const bool needs_cells = on.drift || on.adherence || on.flow || on.critical;
  std::map<DatasetKey, Cell> cells;
  if (needs_cells) cells = load_cells(config, options, false);
  const bool needs_baseline = on.drift || on.adherence || on.flow || on.jaccard;
  std::optional<Baseline> baseline;
  if (needs_baseline) baseline = load_baseline(config, options, on.flow);

  ConfusableSets sets =
      config.confusable_sets
          ? load_confusable_sets(*config.confusable_sets,
                                 baseline ? baseline->gold.label_set()
                                          : tacred_labels())
          : ConfusableSets::defaults();

  std::optional<TypeConstraintTable> table;
  if (on.adherence || on.critical) {
    if (!config.train) {
      throw Error("--train is required for adherence and critical analyses");
    }
    table = build_constraint_table(load_corpus(*config.train, std::nullopt,
                                               options));
  }

  std::string summary;
  if (on.drift) {
    std::map<DatasetKey, double> drift;
    for (const auto& [key, cell] : cells) {
      if (cell.preds) drift[key] = no_relation_drift(cell.gold, *cell.preds);
    }
    ordered_json report = ordered_json::object();
    report["std"] = baseline->preds ? ordered_json(no_relation_drift(
                                          baseline->gold, *baseline->preds))
                                    : ordered_json(nullptr);
    report["cells"] = per_cell<double>(
        keys, drift, [](const double& v) { return ordered_json(v); });
    write_report(config, "drift.json", report);
    summary += "no_relation drift (%):";
    if (baseline->preds) {
      summary += fmt::format(
          " std {:+.1f}", no_relation_drift(baseline->gold, *baseline->preds));
    }
    for (const auto& [key, v] : drift) {
      summary += fmt::format(" {} {:+.1f}", cell_name(key), v);
    }
    summary += "\n";
  }

  if (on.adherence) {
    auto to_json = [](const AdherenceReport& r) {
      return ordered_json{{"adherent", r.adherent},
                          {"total", r.total},
                          {"percent", r.percent()}};
    };
    std::map<DatasetKey, AdherenceReport> reports;
    for (const auto& [key, cell] : cells) {
      if (cell.preds) {
        reports[key] =
            adherence(cell.gold, *cell.preds, *table, config.adherence);
      }
    }
    ordered_json report = ordered_json::object();
    report["options"] = {
        {"no_relation_always_allowed",
         config.adherence.no_relation_always_allowed},
        {"positive_gold_only", config.adherence.positive_gold_only}};
    report["std"] = baseline->preds
                        ? to_json(adherence(baseline->gold, *baseline->preds,
                                            *table, config.adherence))
                        : ordered_json(nullptr);
    report["cells"] = per_cell<AdherenceReport>(keys, reports, to_json);
    write_report(config, "adherence.json", report);
    summary += "type-constraint adherence (%):";
    for (const auto& [key, r] : reports) {
      summary += fmt::format(" {} {:.1f}", cell_name(key), r.percent());
    }
    summary += "\n";
  }

  if (on.flow) {
    const fs::path csv_dir = config.out_dir / "flow";
    ordered_json groups = ordered_json::array();
    for (const ConfusableGroup& g : sets.groups()) {
      std::map<DatasetKey, FlowMatrix> flows;
      for (const auto& [key, cell] : cells) {
        if (!cell.preds) continue;
        FlowMatrix flow = confusable_flow(*baseline->preds, *cell.preds,
                                          baseline->gold, sets, g.name);
        write_file_atomic(csv_dir / (g.name + "_" + cell_name(key) + ".csv"),
                          flow_to_csv(flow));
        flows.emplace(key, std::move(flow));
      }
      groups.push_back(
          {{"group", g.name},
           {"cells", per_cell<FlowMatrix>(keys, flows, flow_to_json)}});
    }
    write_report(config, "flow.json", {{"groups", groups}});
    summary += fmt::format("flow matrices: {} groups\n", sets.groups().size());
  }

  if (on.jaccard) {
    const std::vector<JaccardMatrix> matrices =
        jaccard_groups(baseline->gold, sets, config.jaccard_mode);
    ordered_json groups = ordered_json::array();
    for (const JaccardMatrix& m : matrices) {
      write_file_atomic(config.out_dir / "jaccard" / (m.group + ".csv"),
                        jaccard_to_csv(m));
      groups.push_back(jaccard_to_json(m));
    }
    write_report(config, "jaccard.json",
                 {{"mode", config.jaccard_mode == JaccardMode::kRelationAggregate
                               ? "relation_aggregate"
                               : "sentence_pair_mean"},
                  {"groups", groups}});
    summary += fmt::format("jaccard matrices: {} groups\n", matrices.size());
  }

  if (on.critical) {
    auto rates_json = [](const std::map<std::string, CriticalRate>& rates) {
      ordered_json j = ordered_json::object();
      for (const auto& [relation, r] : rates) {
        j[relation] = {{"critical", r.critical},
                       {"generated", r.generated},
                       {"percent", r.percent()}};
      }
      return j;
    };
    ordered_json by_target = ordered_json::object();
    std::map<std::string, CriticalRate> pooled;
    for (const auto& [key, cell] : cells) {
      if (key.strategy != Strategy::kDiffType) continue;
      const auto rates = critical_generation_rate(cell.gold, sets, *table);
      by_target[std::string(tag(key.target))] = rates_json(rates);
      for (const auto& [relation, r] : rates) {
        pooled[relation].critical += r.critical;
        pooled[relation].generated += r.generated;
      }
    }
    write_report(config, "critical.json",
                 {{"targets", by_target}, {"all", rates_json(pooled)}});
    summary += fmt::format("critical generation: {} relations\n", pooled.size());
  }

  std::cout << summary;
  return 0;
}

std::optional<double> optional_number(const ordered_json& j) {
  if (j.is_number()) return j.get<double>();
  return std::nullopt;
}

int plot_cmd(const RunConfig& config) {
  const fs::path out = config.out_dir;
  const fs::path plots = out / "plots";
  int written = 0;

  if (fs::exists(out / "jaccard.json")) {
    const ordered_json doc = ordered_json::parse(read_file(out / "jaccard.json"));
    for (const auto& g : doc.at("groups")) {
      Heatmap map;
      map.title = "Jaccard similarity: " + g.at("group").get<std::string>();
      map.row_labels = g.at("relations").get<std::vector<std::string>>();
      map.col_labels = map.row_labels;
      for (const auto& row : g.at("values")) {
        std::vector<std::optional<double>> r;
        for (const auto& v : row) r.push_back(optional_number(v));
        map.values.push_back(std::move(r));
      }
      map.min_value = 0.0;
      map.max_value = 1.0;
      write_file_atomic(plots / ("jaccard_" + g.at("group").get<std::string>() +
                                 ".svg"),
                        heatmap_svg(map));
      ++written;
    }
  }

  if (fs::exists(out / "flow.json")) {
    const ordered_json doc = ordered_json::parse(read_file(out / "flow.json"));
    Heatmap in_set;
    in_set.title = "Changed predictions staying within the group (%)";
    in_set.min_value = 0.0;
    in_set.max_value = 100.0;
    in_set.decimals = 1;
    for (const DatasetKey& key : all_dataset_keys()) {
      in_set.col_labels.push_back(cell_name(key));
    }
    for (const auto& g : doc.at("groups")) {
      const std::string group = g.at("group").get<std::string>();
      in_set.row_labels.push_back(group);
      std::vector<std::optional<double>> row;
      for (const DatasetKey& key : all_dataset_keys()) {
        const auto& cells = g.at("cells");
        std::optional<double> v;
        auto s = cells.find(std::string(tag(key.strategy)));
        if (s != cells.end()) {
          auto t = s->find(std::string(tag(key.target)));
          if (t != s->end() && t->is_object()) {
            v = optional_number(t->at("in_set_percent"));
            Heatmap flow;
            flow.title = "Flow " + group + " (" + cell_name(key) + ")";
            flow.row_labels = t->at("labels").get<std::vector<std::string>>();
            flow.col_labels = flow.row_labels;
            flow.decimals = 0;
            for (const auto& r : t->at("counts")) {
              std::vector<std::optional<double>> cr;
              for (const auto& c : r) cr.push_back(c.get<double>());
              flow.values.push_back(std::move(cr));
            }
            write_file_atomic(
                plots / ("flow_" + group + "_" + cell_name(key) + ".svg"),
                heatmap_svg(flow));
            ++written;
          }
        }
        row.push_back(v);
      }
      in_set.values.push_back(std::move(row));
    }
    write_file_atomic(plots / "flow_in_set.svg", heatmap_svg(in_set));
    ++written;
  }

  if (fs::exists(out / "adherence.json")) {
    const ordered_json doc =
        ordered_json::parse(read_file(out / "adherence.json"));
    Heatmap map;
    map.title = "Predictions adhering to type constraints (%)";
    map.min_value = 0.0;
    map.max_value = 100.0;
    map.decimals = 1;
    map.row_labels = {config.model_name};
    std::vector<std::optional<double>> row;
    const auto& cells = doc.at("cells");
    for (const DatasetKey& key : all_dataset_keys()) {
      map.col_labels.push_back(cell_name(key));
      std::optional<double> v;
      auto s = cells.find(std::string(tag(key.strategy)));
      if (s != cells.end()) {
        auto t = s->find(std::string(tag(key.target)));
        if (t != s->end() && t->is_object()) v = t->at("percent").get<double>();
      }
      row.push_back(v);
    }
    map.values = {row};
    write_file_atomic(plots / "adherence.svg", heatmap_svg(map));
    ++written;
  }

  std::cout << fmt::format("wrote {} plots to {}\n", written, plots.string());
  return 0;
}

}  // namespace

std::vector<DatasetKey> selected_keys(const RunConfig& config) {
  std::vector<DatasetKey> keys;
  for (const DatasetKey& key : all_dataset_keys()) {
    auto want = [](const auto& list, auto v) {
      return list.empty() || std::find(list.begin(), list.end(), v) != list.end();
    };
    if (want(config.strategies, key.strategy) &&
        want(config.targets, key.target)) {
      keys.push_back(key);
    }
  }
  return keys;
}

int cmd_generate(const RunConfig& config) {
  return guarded("generate", [&] { return generate(config); });
}

int cmd_score(const RunConfig& config) {
  return guarded("score", [&] { return score_cmd(config); });
}

int cmd_analyze(const RunConfig& config) {
  return guarded("analyze", [&] { return analyze_cmd(config); });
}

int cmd_plot(const RunConfig& config) {
  return guarded("plot", [&] { return plot_cmd(config); });
}

int cmd_full(const RunConfig& config) {
  if (int rc = cmd_generate(config); rc != 0) return rc;
  if (!config.preds_dir || !fs::exists(*config.preds_dir / kStdPredFile)) {
    spdlog::info("full: no {} in the predictions directory; stopping after "
                 "generate",
                 kStdPredFile);
    return 0;
  }
  if (int rc = cmd_score(config); rc != 0) return rc;
  return cmd_analyze(config);
}

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"Entity-substitution adversarial datasets and diagnostics for "
               "relation extraction"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kToolVersion));

  RunConfig config;
  std::string data, links, train, donors, donor_links, preds, gold, manifest,
      confusable;
  std::vector<std::string> strategies, targets;
  std::string on_empty = "skip";
  std::uint64_t seed = 0;
  bool all_analyses = false;
  bool sentence_mean = false;
  bool verbose = false;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--data", data, "TACRED-format corpus to transform");
    sub->add_option("--links", links,
                    "Entity links: {id: {\"subj\": id|null, \"obj\": id|null}}");
    sub->add_option("--out", config.out_dir, "Output directory")
        ->capture_default_str();
    sub->add_option("--gold-dir", gold,
                    "Directory holding generated datasets (default: --out)");
    sub->add_option("--preds-dir", preds,
                    "Directory of pred_std.jsonl / pred_<strategy>_<target>.jsonl");
    sub->add_option("--train", train, "Training split for type constraints");
    sub->add_option("--labels", config.labels,
                    "tacred | inferred | JSON array file of relation labels")
        ->capture_default_str();
    sub->add_option("--strategies", strategies,
                    "Subset of same_role,same_type,diff_type,masking")
        ->delimiter(',');
    sub->add_option("--targets", targets, "Subset of subj,obj,both")
        ->delimiter(',');
    sub->add_option("--threads", config.threads, "Worker threads (0: all cores)")
        ->capture_default_str();
    sub->add_flag("-v,--verbose", verbose, "Debug logging");
  };
  auto generation = [&](CLI::App* sub) {
    sub->add_option("--seed", seed, "64-bit generation seed");
    sub->add_option("--on-empty", on_empty,
                    "When no candidate exists: skip the example or fail")
        ->check(CLI::IsMember({"skip", "fail"}))
        ->capture_default_str();
    sub->add_option("--donors", donors,
                    "Separate donor corpus for candidate pools");
    sub->add_option("--donor-links", donor_links, "Links for --donors");
    sub->add_option("--manifest", manifest,
                    "Re-run with the settings of a previous manifest.json");
  };
  auto analysis = [&](CLI::App* sub) {
    sub->add_flag("--drift", config.analyses.drift, "no_relation drift");
    sub->add_flag("--adherence", config.analyses.adherence,
                  "Type-constraint adherence (needs --train)");
    sub->add_flag("--flow", config.analyses.flow, "Confusable-relation flow");
    sub->add_flag("--jaccard", config.analyses.jaccard,
                  "Token Jaccard within confusable groups");
    sub->add_flag("--critical", config.analyses.critical,
                  "Critical-generation rates (needs --train)");
    sub->add_flag("--all-analyses", all_analyses, "Enable every analysis");
    sub->add_option("--confusable-sets", confusable,
                    "JSON file overriding the default confusable groups");
    sub->add_flag("--no-relation-always-allowed",
                  config.adherence.no_relation_always_allowed,
                  "Treat no_relation predictions as adherent");
    sub->add_flag("--positive-gold-only", config.adherence.positive_gold_only,
                  "Adherence over positive-gold examples only");
    sub->add_flag("--jaccard-sentence-mean", sentence_mean,
                  "Mean sentence-pair Jaccard instead of per-relation sets");
  };
  auto scoring = [&](CLI::App* sub) {
    sub->add_option("--model-name", config.model_name, "Row label in tables");
  };

  CLI::App* gen = app.add_subcommand("generate", "Write the adversarial datasets");
  common(gen);
  generation(gen);
  CLI::App* sc = app.add_subcommand("score", "Score predictions per dataset");
  common(sc);
  scoring(sc);
  CLI::App* an = app.add_subcommand("analyze", "Run diagnostic analyses");
  common(an);
  analysis(an);
  CLI::App* full = app.add_subcommand("full", "generate, score and analyze");
  common(full);
  generation(full);
  scoring(full);
  analysis(full);
  CLI::App* plot = app.add_subcommand("plot", "Render SVG heatmaps of reports");
  common(plot);
  scoring(plot);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  spdlog::set_default_logger(std::make_shared<spdlog::logger>(
      "readv", std::make_shared<spdlog::sinks::stderr_color_sink_mt>()));
  spdlog::set_level(verbose ? spdlog::level::debug : spdlog::level::info);
  auto opt_path = [](const std::string& s) {
    return s.empty() ? std::nullopt : std::optional<fs::path>(s);
  };
  config.data = opt_path(data);
  config.links = opt_path(links);
  config.train = opt_path(train);
  config.donors = opt_path(donors);
  config.donor_links = opt_path(donor_links);
  config.preds_dir = opt_path(preds);
  config.gold_dir = opt_path(gold);
  config.manifest = opt_path(manifest);
  config.confusable_sets = opt_path(confusable);
  if (app.got_subcommand(gen) || app.got_subcommand(full)) {
    CLI::App* sub = app.got_subcommand(gen) ? gen : full;
    if (sub->count("--seed") > 0) config.seed = seed;
  }
  try {
    for (const auto& s : strategies) config.strategies.push_back(parse_strategy(s));
    for (const auto& t : targets) config.targets.push_back(parse_target(t));
    config.on_empty = parse_on_empty(on_empty);
  } catch (const Error& e) {
    spdlog::error("{}", e.what());
    return 2;
  }
  if (all_analyses) config.analyses = {true, true, true, true, true};
  if (sentence_mean) config.jaccard_mode = JaccardMode::kSentencePairMean;

  if (app.got_subcommand(gen)) return cmd_generate(config);
  if (app.got_subcommand(sc)) return cmd_score(config);
  if (app.got_subcommand(an)) return cmd_analyze(config);
  if (app.got_subcommand(full)) return cmd_full(config);
  return cmd_plot(config);
}

}  // namespace readv
