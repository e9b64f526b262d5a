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

// JSON encoding of models, reports and explanations. Doubles are written in
// shortest round-trip form, so a reloaded model predicts bit-identically.
// Non-finite values are written as null.

#ifndef PANELLIME_SERIALIZATION_H_
#define PANELLIME_SERIALIZATION_H_

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "panellime/data_table.h"
#include "panellime/evaluation.h"
#include "panellime/global_explanations.h"
#include "panellime/imputation.h"
#include "panellime/lime.h"
#include "panellime/models.h"

namespace panellime {

using Json = nlohmann::ordered_json;

inline constexpr int kModelFormatVersion = 1;

Json to_json(const Hyperparameters& hp);
Hyperparameters hyperparameters_from_json(const Json& j);

Json to_json(const Predictor& model);
// Throws DataError on an unknown format or version.
Predictor predictor_from_json(const Json& j);

Json to_json(const SearchReport& report);
Json to_json(const ImputationReport& report);
Json to_json(const SplitIndices& split);
SplitIndices split_from_json(const Json& j);

Json to_json(const LimeConfig& config);
LimeConfig lime_config_from_json(const Json& j);
Json to_json(const FeatureStats& stats);
FeatureStats feature_stats_from_json(const Json& j);

Json to_json(const Explanation& e);
Explanation explanation_from_json(const Json& j);
Json to_json(std::span<const Explanation> explanations);
std::vector<Explanation> explanations_from_json(const Json& j);

Json to_json(const WeightMatrix& w);
Json to_json(const PickSelection& pick);
Json to_json(const EvalReport& report);
Json to_json(const EntityCodebook& codebook);

// Pretty-printed with a trailing newline.
std::string dump_json(const Json& j);
void write_json_file(const std::filesystem::path& path, const Json& j);
Json read_json_file(const std::filesystem::path& path);

}  // namespace panellime

#endif  // PANELLIME_SERIALIZATION_H_
