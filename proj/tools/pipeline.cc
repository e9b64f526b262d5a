/*
 * Copyright 2026 The panellime Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "pipeline.h"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "panellime/serialization.h"
#include "panellime/svg.h"

namespace panellime::cli {
namespace {

namespace fs = std::filesystem;

struct StageSpec {
  std::string name;
  std::vector<std::string> sections;
  std::vector<std::string> upstream;
};

const std::vector<StageSpec>& stage_specs() {
  static const std::vector<StageSpec> specs = {
      {"impute", {"data", "impute"}, {}},         {"reformat", {"reformat"}, {"impute"}},
      {"train", {"split", "train"}, {"reformat"}}, {"explain", {"lime"}, {"train"}},
      {"pick", {"pick"}, {"explain"}},             {"ice", {"ice"}, {"train"}},
      {"eval", {"eval", "lime"}, {"train"}},
  };
  return specs;
}

const StageSpec& spec(const std::string& name) {
  for (const auto& s : stage_specs()) {
    if (s.name == name) return s;
  }
  throw std::logic_error("unknown stage " + name);
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UpstreamError("missing " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw std::runtime_error("cannot write " + path.string());
}

fs::path artifact(const PipelineConfig& c, const std::string& name) { return c.out_dir / name; }

std::string stage_hash(const PipelineConfig& c, const std::string& name) {
  const StageSpec& s = spec(name);
  std::string text = "stage " + name + "\n" + section_text(c, "run");
  for (const auto& section : s.sections) text += section_text(c, section);
  if (name == "impute") {
    text += "input " + (fs::exists(c.data_path) ? file_hash(c.data_path) : std::string("missing")) + "\n";
    if (!c.rename_map.empty()) {
      text += "rename " + (fs::exists(c.rename_map) ? file_hash(c.rename_map) : std::string("missing")) + "\n";
    }
  }
  for (const auto& u : s.upstream) text += "upstream " + u + " " + stage_hash(c, u) + "\n";
  return fnv1a_hex(text);
}

Json load_manifest(const PipelineConfig& c) {
  const fs::path path = artifact(c, kManifestFile);
  if (!fs::exists(path)) return Json::object();
  try {
    return read_json_file(path);
  } catch (const DataError&) {
    return Json::object();
  }
}

void check_upstream(const PipelineConfig& c, const std::string& name) {
  const Json manifest = load_manifest(c);
  for (const auto& u : spec(name).upstream) {
    if (!manifest.contains("stages") || !manifest["stages"].contains(u)) {
      throw UpstreamError("upstream stage '" + u + "' has not been run in " + c.out_dir.string());
    }
    const Json& entry = manifest["stages"][u];
    if (entry.value("config_hash", "") != stage_hash(c, u)) {
      throw UpstreamError("upstream stage '" + u + "' is stale: its configuration or inputs changed; rerun it");
    }
    for (const auto& [file, hash] : entry.at("outputs").items()) {
      const fs::path path = artifact(c, file);
      if (!fs::exists(path)) throw UpstreamError("upstream artifact missing: " + path.string());
      if (file_hash(path) != hash.get<std::string>()) {
        throw UpstreamError("upstream artifact " + path.string() + " was modified after stage '" + u + "' ran");
      }
    }
  }
}

void record_stage(const PipelineConfig& c, const std::string& name, const std::vector<std::string>& outputs) {
  Json old = load_manifest(c);
  Json stages = old.contains("stages") && old["stages"].is_object() ? old["stages"] : Json::object();
  Json entry{{"config_hash", stage_hash(c, name)}};
  if (name == "impute") {
    Json inputs = Json::object();
    inputs[c.data_path.string()] = file_hash(c.data_path);
    if (!c.rename_map.empty()) inputs[c.rename_map.string()] = file_hash(c.rename_map);
    entry["inputs"] = std::move(inputs);
  }
  Json out = Json::object();
  for (const auto& f : outputs) out[f] = file_hash(artifact(c, f));
  entry["outputs"] = std::move(out);
  stages[name] = std::move(entry);

  std::string all_sections;
  for (const char* s : {"data", "impute", "reformat", "split", "train", "lime", "pick", "ice", "eval", "run"}) {
    all_sections += section_text(c, s);
  }
  Json ordered = Json::object();
  for (const auto& s : stage_specs()) {
    if (stages.contains(s.name)) ordered[s.name] = stages[s.name];
  }
  const Json manifest{{"tool", "panellime"},
                      {"version", kToolVersion},
                      {"model_format_version", kModelFormatVersion},
                      {"master_seed", c.seed},
                      {"config_hash", fnv1a_hex(all_sections)},
                      {"stages", std::move(ordered)}};
  write_json_file(artifact(c, kManifestFile), manifest);
}

Schema reformatted_schema(const PipelineConfig& c) {
  Schema s = c.schema;
  if (std::find(s.categorical.begin(), s.categorical.end(), kPeriodColumn) == s.categorical.end()) {
    s.categorical.emplace_back(kPeriodColumn);
  }
  return s;
}

// Reformatted rows with every feature and the target observed.
DataTable load_model_table(const PipelineConfig& c) {
  const DataTable full = load_csv(artifact(c, "reformatted.csv"), reformatted_schema(c), RowOrder::as_written);
  DataTable table = drop_incomplete_rows(full);
  if (table.n_rows() < full.n_rows()) {
    log_info("dropped " + std::to_string(full.n_rows() - table.n_rows()) + " rows with missing features or target");
  }
  return table;
}

struct Trained {
  DataTable table;
  SplitIndices split;
  Predictor model;
  FeatureStats stats;
};

Trained load_trained(const PipelineConfig& c) {
  Trained t{load_model_table(c), split_from_json(read_json_file(artifact(c, "split.json"))),
            predictor_from_json(read_json_file(artifact(c, "model.json"))),
            feature_stats_from_json(read_json_file(artifact(c, "feature_stats.json")))};
  for (const auto& idx : {t.split.train, t.split.test}) {
    for (const auto r : idx) {
      if (r < 0 || r >= t.table.n_rows()) throw UpstreamError("split.json does not match reformatted.csv");
    }
  }
  if (t.model.n_features() != static_cast<Eigen::Index>(t.table.feature_columns().size())) {
    throw UpstreamError("model.json does not match reformatted.csv");
  }
  return t;
}

std::vector<Eigen::Index> explain_rows(const PipelineConfig& c, const Trained& t, int cap) {
  std::vector<Eigen::Index> rows;
  if (c.explain_rows == ExplainRows::all) {
    for (Eigen::Index r = 0; r < t.table.n_rows(); ++r) rows.push_back(r);
  } else {
    rows = t.split.test;
  }
  if (cap > 0 && rows.size() > static_cast<std::size_t>(cap)) rows.resize(static_cast<std::size_t>(cap));
  return rows;
}

std::string file_safe(const std::string& s) {
  std::string out;
  for (const char ch : s) out += std::isalnum(static_cast<unsigned char>(ch)) ? ch : '_';
  return out;
}

}  // namespace

const std::vector<std::string>& subcommands() {
  static const std::vector<std::string> names = {"impute", "reformat", "train", "explain",
                                                 "pick",   "ice",      "eval",  "pipeline"};
  return names;
}

std::string fnv1a_hex(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const char ch : bytes) {
    h ^= static_cast<unsigned char>(ch);
    h *= 0x100000001b3ULL;
  }
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i, h >>= 4) out[static_cast<std::size_t>(i)] = kDigits[h & 0xf];
  return out;
}

std::string file_hash(const fs::path& path) { return fnv1a_hex(read_file(path)); }

void run_impute(const PipelineConfig& c) {
  if (!fs::exists(c.data_path)) throw UpstreamError("dataset not found: " + c.data_path.string());
  DataTable table = load_csv(c.data_path, c.schema);
  if (!c.rename_map.empty()) table = apply_rename_map(table, load_rename_map(c.rename_map));
  ImputationPolicy policy = c.imputation;
  policy.seed = stage_seed(c, SeedStream::imputation);
  auto [imputed, report] = impute_table(table, policy);
  log_info("impute: " + std::to_string(report.rows_imputed) + " rows imputed, " +
           std::to_string(report.rows_skipped) + " rows above the missing-rate threshold");
  write_table_csv(artifact(c, "imputed.csv"), imputed);
  write_json_file(artifact(c, "imputation_report.json"), to_json(report));
  record_stage(c, "impute", {"imputed.csv", "imputation_report.json"});
}

void run_reformat(const PipelineConfig& c) {
  check_upstream(c, "reformat");
  const DataTable imputed = load_csv(artifact(c, "imputed.csv"), c.schema);
  const auto [encoded, codebook] = encode_entities(reformat(imputed, c.strategy));
  write_table_csv(artifact(c, "reformatted.csv"), encoded);
  write_json_file(artifact(c, "codebook.json"), to_json(codebook));
  record_stage(c, "reformat", {"reformatted.csv", "codebook.json"});
}

void run_train(const PipelineConfig& c) {
  check_upstream(c, "train");
  const DataTable table = load_model_table(c);
  if (table.n_rows() < 2) throw NumericalError("train: fewer than two complete reformatted rows");
  const SplitIndices split = split_indices(table.n_rows(), SplitSpec{c.train_fraction, stage_seed(c, SeedStream::split)});
  const DataTable train = table.select_rows(split.train);
  SearchConfig search = c.search;
  search.seed = stage_seed(c, SeedStream::search);
  const SearchResult result = budgeted_search(train, search);
  const FeatureStats stats = FeatureStats::from_matrix(train.feature_matrix(), train.feature_names());
  log_info("train: best " + std::string(to_string(result.model.family())) + " with validation score " +
           format_double(result.report.trials[result.report.best_index].validation_score));
  write_json_file(artifact(c, "split.json"), to_json(split));
  write_json_file(artifact(c, "model.json"), to_json(result.model));
  write_json_file(artifact(c, "search_report.json"), to_json(result.report));
  write_json_file(artifact(c, "feature_stats.json"), to_json(stats));
  record_stage(c, "train", {"split.json", "model.json", "search_report.json", "feature_stats.json"});
}

void run_explain(const PipelineConfig& c) {
  check_upstream(c, "explain");
  const Trained t = load_trained(c);
  const Eigen::MatrixXd x = t.table.feature_matrix();
  const std::uint64_t seed = stage_seed(c, SeedStream::lime);
  std::vector<Explanation> explanations;
  int failed = 0;
  for (const Eigen::Index r : explain_rows(c, t, c.explain_max_instances)) {
    LimeConfig lime = c.lime;
    lime.seed = derive_seed(seed, static_cast<std::uint64_t>(r));
    try {
      Explanation e = explain(t.model, x.row(r).transpose(), t.stats, lime, r);
      e.label = t.table.row_label(r);
      e.target = t.table.value(r, t.table.target_column());
      explanations.push_back(std::move(e));
    } catch (const KernelTooNarrow& e) {
      ++failed;
      log_warning("explain: row " + t.table.row_label(r) + ": " + e.what());
    }
  }
  if (failed > 0) log_warning("explain: " + std::to_string(failed) + " explanations failed");
  write_json_file(artifact(c, "explanations.json"), to_json(std::span<const Explanation>(explanations)));
  write_json_file(artifact(c, "weight_matrix.json"), to_json(WeightMatrix::from_explanations(explanations, t.stats.names)));
  if (c.write_svg) {
    const std::size_t n = std::min<std::size_t>(explanations.size(), 20);
    for (std::size_t i = 0; i < n; ++i) {
      write_text(artifact(c, "explanation_" + std::to_string(explanations[i].instance_id) + ".svg"),
                 explanation_svg(explanations[i]));
    }
  }
  record_stage(c, "explain", {"explanations.json", "weight_matrix.json"});
}

void run_pick(const PipelineConfig& c) {
  check_upstream(c, "pick");
  const std::vector<Explanation> explanations = explanations_from_json(read_json_file(artifact(c, "explanations.json")));
  const FeatureStats stats = feature_stats_from_json(read_json_file(artifact(c, "feature_stats.json")));
  PickSelection pick;
  pick.budget = c.pick_budget;
  pick.mode = c.coverage_mode;
  std::vector<Explanation> picked;
  if (!explanations.empty()) {
    pick = greedy_pick(WeightMatrix::from_explanations(explanations, stats.names), c.pick_budget, c.coverage_mode);
    for (const auto r : pick.rows) picked.push_back(explanations[static_cast<std::size_t>(r)]);
  }
  Json labels = Json::array();
  for (const auto& e : picked) labels.push_back(Json{{"instance_id", e.instance_id}, {"label", e.label}});
  write_json_file(artifact(c, "pick.json"), Json{{"selection", to_json(pick)}, {"picked", std::move(labels)}});

  CsvDocument freq;
  freq.header = {"feature", "count"};
  for (const auto& f : selection_frequency(picked, c.pick_top_k)) freq.rows.push_back({f.name, std::to_string(f.count)});
  write_csv_file(artifact(c, "selection_frequency.csv"), freq);
  record_stage(c, "pick", {"pick.json", "selection_frequency.csv"});
}

void run_ice(const PipelineConfig& c) {
  check_upstream(c, "ice");
  const Trained t = load_trained(c);
  const Eigen::MatrixXd x = t.table.feature_matrix();
  std::vector<Eigen::Index> rows = explain_rows(c, t, c.ice_max_instances);
  Eigen::MatrixXd instances(static_cast<Eigen::Index>(rows.size()), x.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) instances.row(static_cast<Eigen::Index>(i)) = x.row(rows[i]);
  Eigen::MatrixXd train_x(static_cast<Eigen::Index>(t.split.train.size()), x.cols());
  for (std::size_t i = 0; i < t.split.train.size(); ++i) {
    train_x.row(static_cast<Eigen::Index>(i)) = x.row(t.split.train[i]);
  }

  std::vector<Eigen::Index> features;
  const auto& names = t.model.feature_names();
  if (c.ice_features.empty()) {
    for (Eigen::Index j = 0; j < x.cols(); ++j) features.push_back(j);
  } else {
    for (const auto& name : c.ice_features) {
      const auto it = std::find(names.begin(), names.end(), name);
      if (it == names.end()) throw ConfigError("config: [ice] unknown feature '" + name + "'");
      features.push_back(it - names.begin());
    }
  }

  CsvDocument ice;
  ice.header = {"feature", "grid_value", "instance_id", "prediction"};
  std::vector<IceCurve> curves;
  if (instances.rows() > 0) {
    for (const Eigen::Index j : features) {
      const Eigen::VectorXd grid = default_grid(train_x.col(j), c.ice_grid_points);
      if (!(grid(grid.size() - 1) > grid(0))) {
        log_warning("ice: feature '" + names[static_cast<std::size_t>(j)] + "' is constant in training; skipped");
        continue;
      }
      IceCurve curve = ice_curves(t.model, instances, j, grid);
      for (Eigen::Index i = 0; i < curve.predictions.rows(); ++i) {
        for (Eigen::Index g = 0; g < grid.size(); ++g) {
          ice.rows.push_back({curve.name, format_double(grid(g)), std::to_string(rows[static_cast<std::size_t>(i)]),
                              format_double(curve.predictions(i, g))});
        }
      }
      if (c.write_svg) write_text(artifact(c, "ice_" + file_safe(curve.name) + ".svg"), ice_svg(curve));
      curves.push_back(std::move(curve));
    }
  }
  write_csv_file(artifact(c, "ice.csv"), ice);

  CsvDocument rank;
  rank.header = {"rank", "feature", "slope_score"};
  int position = 1;
  for (const auto& s : slope_rank(curves)) rank.rows.push_back({std::to_string(position++), s.name, format_double(s.score)});
  write_csv_file(artifact(c, "slope_rank.csv"), rank);
  record_stage(c, "ice", {"ice.csv", "slope_rank.csv"});
}

void run_eval(const PipelineConfig& c) {
  check_upstream(c, "eval");
  const Trained t = load_trained(c);
  const DataTable test = t.table.select_rows(t.split.test);
  Json report;
  if (test.n_rows() < 2) {
    log_warning("eval: the test split has " + std::to_string(test.n_rows()) + " rows; experiment skipped");
    report = Json{{"skipped", true}, {"reason", "test split has fewer than two rows"}, {"test_rows", test.n_rows()}};
  } else {
    ExperimentConfig e = c.eval;
    e.seed = stage_seed(c, SeedStream::eval);
    const EvalReport r = lime_vs_random_experiment(t.model, test, t.stats, c.lime, e);
    report = to_json(r);
    if (c.write_svg) write_text(artifact(c, "eval.svg"), eval_svg(r));
    log_info("eval: mean R^2 LIME " + format_double(r.mean_r2_lime()) + ", random " +
             format_double(r.mean_r2_random()) + ", p = " + format_double(r.p_value));
  }
  write_json_file(artifact(c, "eval_report.json"), report);
  record_stage(c, "eval", {"eval_report.json"});
}

void run_pipeline(const PipelineConfig& c) {
  run_impute(c);
  run_reformat(c);
  run_train(c);
  run_explain(c);
  run_pick(c);
  run_ice(c);
  run_eval(c);
}

int run_subcommand(const std::string& name, const PipelineConfig& config) {
  try {
    config.validate();
    fs::create_directories(config.out_dir);
    if (name == "impute") {
      run_impute(config);
    } else if (name == "reformat") {
      run_reformat(config);
    } else if (name == "train") {
      run_train(config);
    } else if (name == "explain") {
      run_explain(config);
    } else if (name == "pick") {
      run_pick(config);
    } else if (name == "ice") {
      run_ice(config);
    } else if (name == "eval") {
      run_eval(config);
    } else if (name == "pipeline") {
      run_pipeline(config);
    } else {
      throw ConfigError("unknown subcommand '" + name + "'");
    }
    return kOk;
  } catch (const ConfigError& e) {
    std::cerr << "panellime " << name << ": invalid configuration: " << e.what() << "\n";
    return kInvalidConfig;
  } catch (const UpstreamError& e) {
    std::cerr << "panellime " << name << ": " << e.what() << "\n";
    return kUpstreamMissing;
  } catch (const std::exception& e) {
    std::cerr << "panellime " << name << ": error: " << e.what() << "\n";
    return kRuntimeFailure;
  }
}

}  // namespace panellime::cli
