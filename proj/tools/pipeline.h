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

// Pipeline stages and their artifacts. Each stage reads its upstream
// artifacts from the output directory, checks them against run_manifest.json
// and records its own outputs there.

#ifndef PANELLIME_TOOLS_PIPELINE_H_
#define PANELLIME_TOOLS_PIPELINE_H_

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "config.h"

namespace panellime::cli {

// A required upstream artifact is missing or was produced under a different
// configuration.
class UpstreamError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum ExitCode { kOk = 0, kRuntimeFailure = 1, kInvalidConfig = 2, kUpstreamMissing = 3 };

inline constexpr const char* kManifestFile = "run_manifest.json";

const std::vector<std::string>& subcommands();

// 64-bit FNV-1a, as 16 hex digits.
std::string fnv1a_hex(std::string_view bytes);
std::string file_hash(const std::filesystem::path& path);

void run_impute(const PipelineConfig& config);
void run_reformat(const PipelineConfig& config);
void run_train(const PipelineConfig& config);
void run_explain(const PipelineConfig& config);
void run_pick(const PipelineConfig& config);
void run_ice(const PipelineConfig& config);
void run_eval(const PipelineConfig& config);
// impute -> reformat -> train -> explain -> pick -> ice -> eval.
void run_pipeline(const PipelineConfig& config);

// Runs one subcommand, printing a one-line diagnostic on failure.
int run_subcommand(const std::string& name, const PipelineConfig& config);

// Full command line: argument parsing, config loading, overrides, dispatch.
int run_cli(int argc, const char* const* argv);

}  // namespace panellime::cli

#endif  // PANELLIME_TOOLS_PIPELINE_H_
