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

// Pipeline configuration: one INI-style key = value file with sections, plus
// command-line overrides. All randomness derives from [run] seed.

#ifndef PANELLIME_TOOLS_CONFIG_H_
#define PANELLIME_TOOLS_CONFIG_H_

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "panellime/data_table.h"
#include "panellime/evaluation.h"
#include "panellime/global_explanations.h"
#include "panellime/imputation.h"
#include "panellime/lime.h"
#include "panellime/models.h"

namespace panellime::cli {

inline constexpr const char* kToolVersion = "0.1.0";

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class ExplainRows { test, all };

struct PipelineConfig {
  // [data]
  std::filesystem::path data_path;
  Schema schema;
  std::filesystem::path rename_map;
  // [impute]
  ImputationPolicy imputation;
  // [reformat]
  ReformatStrategy strategy = ReformatStrategy::diff_all;
  // [split]
  double train_fraction = 0.8;
  // [train]
  SearchConfig search;
  // [lime]
  LimeConfig lime;
  ExplainRows explain_rows = ExplainRows::test;
  int explain_max_instances = 0;
  // [pick]
  int pick_budget = 20;
  int pick_top_k = 5;
  CoverageMode coverage_mode = CoverageMode::absolute;
  // [ice]
  int ice_grid_points = 20;
  int ice_max_instances = 100;
  std::vector<std::string> ice_features;
  // [eval]
  ExperimentConfig eval;
  // [run]
  std::uint64_t seed = 0;
  std::filesystem::path out_dir = "out";
  bool write_svg = true;

  // Throws ConfigError.
  void validate() const;
};

// Relative paths in the file are resolved against `base_dir`. Unknown
// sections or keys and malformed values throw ConfigError.
PipelineConfig parse_config(const std::string& text, const std::filesystem::path& base_dir = {});
PipelineConfig load_config(const std::filesystem::path& path);

// Canonical text; parse_config(to_ini(c)) reproduces c.
std::string to_ini(const PipelineConfig& config);

// Canonical text of one section, used for stage hashes. The [run] section
// contributes only the seed.
std::string section_text(const PipelineConfig& config, const std::string& section);

// Per-stage seeds derived from the master seed.
enum class SeedStream : std::uint64_t { imputation = 1, split = 2, search = 3, lime = 4, eval = 5 };
std::uint64_t stage_seed(const PipelineConfig& config, SeedStream stream);

}  // namespace panellime::cli

#endif  // PANELLIME_TOOLS_CONFIG_H_
