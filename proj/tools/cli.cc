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

#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "pipeline.h"

namespace panellime::cli {

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"Panel-data LIME pipeline: impute, reformat, train, explain, pick, ice, eval"};
  app.set_help_flag("-h,--help", "Print help and exit");

  std::string command;
  std::optional<std::string> config_path, data, entity, time, target, out, method, strategy, metric, coverage,
      explain_rows_flag;
  std::optional<std::uint64_t> seed;
  std::optional<double> theta, time_budget, kernel_width;
  std::optional<int> budget, k, runs, max_instances, lime_k, samples, pick_budget, top_k;
  std::vector<std::string> families;
  int verbosity = 0;
  bool quiet = false, no_standardize = false, no_svg = false, abs_mode = false, literal_mode = false,
       print_config = false;

  std::vector<std::string> choices = subcommands();
  app.add_option("command", command, "Subcommand")->required()->check(CLI::IsMember(choices));
  app.add_option("--config", config_path, "Configuration file");
  app.add_option("--data", data, "Input panel CSV");
  app.add_option("--entity", entity, "Entity column");
  app.add_option("--time", time, "Time column");
  app.add_option("--target", target, "Target column");
  app.add_option("--seed", seed, "Master seed");
  app.add_option("--out", out, "Output directory");
  app.add_flag("-v,--verbose", verbosity, "More logging (repeat for debug)");
  app.add_flag("-q,--quiet", quiet, "Errors only");
  app.add_option("--method", method, "Imputation method: linear, knn, iterative");
  app.add_option("--theta", theta, "Maximum missing rate of an imputed row");
  app.add_option("--strategy", strategy, "Reformat strategy: diff_all, diff_target_lag");
  app.add_option("--family", families, "Model families to search (repeatable or comma separated)")->delimiter(',');
  app.add_option("--budget", budget, "Search trials");
  app.add_option("--time-budget", time_budget, "Search wall-clock budget in seconds (0 = trial budget)");
  app.add_option("--metric", metric, "Search metric");
  app.add_option("--k", k, "Columns kept in the masking experiment");
  app.add_option("--runs", runs, "Experiment runs");
  app.add_option("--max-instances", max_instances, "Test rows per experiment run (0 = all)");
  app.add_option("--lime-k", lime_k, "Features per explanation");
  app.add_option("--kernel-width", kernel_width, "Kernel width (0 = 0.75 * sqrt(features))");
  app.add_option("--samples", samples, "Perturbed samples per explanation");
  app.add_flag("--no-standardize", no_standardize, "Measure distances in raw feature units");
  app.add_option("--explain-rows", explain_rows_flag, "Rows to explain: test or all");
  app.add_option("--pick-budget", pick_budget, "Explanations chosen by submodular pick");
  app.add_option("--top-k", top_k, "Features counted per picked explanation");
  app.add_option("--coverage", coverage, "Coverage test: abs or positive");
  app.add_flag("--abs", abs_mode, "Coverage counts any nonzero weight");
  app.add_flag("--literal", literal_mode, "Coverage counts only positive weights");
  app.add_flag("--no-svg", no_svg, "Skip SVG charts");
  app.add_flag("--print-config", print_config, "Print the effective configuration and exit");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kInvalidConfig;
  }

  set_log_level(quiet ? LogLevel::quiet : verbosity >= 2 ? LogLevel::debug : verbosity == 1 ? LogLevel::info
                                                                                           : LogLevel::warning);
  PipelineConfig c;
  try {
    if (config_path) c = load_config(*config_path);
    if (data) c.data_path = *data;
    if (entity) c.schema.entity = *entity;
    if (time) c.schema.time = *time;
    if (target) c.schema.target = *target;
    if (seed) c.seed = *seed;
    if (out) c.out_dir = *out;
    if (method) c.imputation.method = parse_imputation_method(*method);
    if (theta) c.imputation.theta = *theta;
    if (strategy) c.strategy = parse_reformat_strategy(*strategy);
    if (!families.empty()) {
      c.search.families.clear();
      for (const auto& f : families) c.search.families.push_back(parse_model_family(f));
    }
    if (budget) c.search.max_trials = *budget;
    if (time_budget) c.search.time_budget_seconds = *time_budget;
    if (metric) c.search.metric = *metric;
    if (k) c.eval.k = *k;
    if (runs) c.eval.n_runs = *runs;
    if (max_instances) c.eval.max_instances = *max_instances;
    if (lime_k) c.lime.k_features = *lime_k;
    if (kernel_width) c.lime.kernel_width = *kernel_width;
    if (samples) c.lime.n_samples = *samples;
    if (no_standardize) c.lime.standardize = false;
    if (explain_rows_flag) {
      if (*explain_rows_flag != "test" && *explain_rows_flag != "all") {
        throw ConfigError("--explain-rows must be test or all");
      }
      c.explain_rows = *explain_rows_flag == "all" ? ExplainRows::all : ExplainRows::test;
    }
    if (pick_budget) c.pick_budget = *pick_budget;
    if (top_k) c.pick_top_k = *top_k;
    if (coverage) c.coverage_mode = parse_coverage_mode(*coverage);
    if (abs_mode && literal_mode) throw ConfigError("--abs and --literal are exclusive");
    if (abs_mode) c.coverage_mode = CoverageMode::absolute;
    if (literal_mode) c.coverage_mode = CoverageMode::positive;
    if (no_svg) c.write_svg = false;
  } catch (const std::invalid_argument& e) {
    std::cerr << "panellime: invalid configuration: " << e.what() << "\n";
    return kInvalidConfig;
  } catch (const ConfigError& e) {
    std::cerr << "panellime: " << e.what() << "\n";
    return kInvalidConfig;
  }
  if (print_config) {
    std::cout << to_ini(c);
    return kOk;
  }
  return run_subcommand(command, c);
}

}  // namespace panellime::cli
