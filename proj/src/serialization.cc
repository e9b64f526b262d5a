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

#include "panellime/serialization.h"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace panellime {
namespace {

Json number(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

double number_from(const Json& j) {
  return j.is_null() ? std::numeric_limits<double>::quiet_NaN() : j.get<double>();
}

Json vector_json(const Eigen::VectorXd& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(number(v(i)));
  return out;
}

Eigen::VectorXd vector_from(const Json& j) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = number_from(j[i]);
  return v;
}

template <typename T>
Json index_list(const std::vector<T>& v) {
  Json out = Json::array();
  for (const auto x : v) out.push_back(x);
  return out;
}

const Json& field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw DataError(std::string("json: missing field '") + key + "'");
  return j.at(key);
}

}  // namespace

Json to_json(const Hyperparameters& hp) {
  return Json{{"n_trees", hp.n_trees},
              {"max_depth", hp.max_depth},
              {"learning_rate", hp.learning_rate},
              {"subsample", hp.subsample},
              {"max_features", hp.max_features},
              {"min_samples_leaf", hp.min_samples_leaf},
              {"l2", hp.l2}};
}

Hyperparameters hyperparameters_from_json(const Json& j) {
  Hyperparameters hp;
  hp.n_trees = field(j, "n_trees").get<int>();
  hp.max_depth = field(j, "max_depth").get<int>();
  hp.learning_rate = field(j, "learning_rate").get<double>();
  hp.subsample = field(j, "subsample").get<double>();
  hp.max_features = field(j, "max_features").get<double>();
  hp.min_samples_leaf = field(j, "min_samples_leaf").get<int>();
  hp.l2 = field(j, "l2").get<double>();
  return hp;
}

Json to_json(const Predictor& model) {
  const Predictor::State& s = model.state();
  Json trees = Json::array();
  for (const auto& tree : s.trees) {
    Json nodes = Json::array();
    for (const auto& n : tree.nodes()) nodes.push_back(Json::array({n.feature, n.threshold, n.left, n.right, n.value}));
    trees.push_back(std::move(nodes));
  }
  return Json{{"format", "panellime-model"},
              {"version", kModelFormatVersion},
              {"family", to_string(s.family)},
              {"feature_names", s.feature_names},
              {"training_seed", s.training_seed},
              {"hyperparameters", to_json(s.hyperparameters)},
              {"base", s.base},
              {"tree_scale", s.tree_scale},
              {"coefficients", vector_json(s.coefficients)},
              {"trees", std::move(trees)}};
}

Predictor predictor_from_json(const Json& j) {
  if (!j.is_object() || j.value("format", "") != "panellime-model") throw DataError("model: not a panellime model file");
  if (field(j, "version").get<int>() != kModelFormatVersion) {
    throw DataError("model: unsupported format version " + field(j, "version").dump());
  }
  Predictor::State s;
  try {
    s.family = parse_model_family(field(j, "family").get<std::string>());
  } catch (const std::invalid_argument& e) {
    throw DataError(std::string("model: ") + e.what());
  }
  s.feature_names = field(j, "feature_names").get<std::vector<std::string>>();
  s.training_seed = field(j, "training_seed").get<std::uint64_t>();
  s.hyperparameters = hyperparameters_from_json(field(j, "hyperparameters"));
  s.base = field(j, "base").get<double>();
  s.tree_scale = field(j, "tree_scale").get<double>();
  s.coefficients = vector_from(field(j, "coefficients"));
  for (const auto& tree : field(j, "trees")) {
    std::vector<RegressionTree::Node> nodes;
    for (const auto& n : tree) {
      if (!n.is_array() || n.size() != 5) throw DataError("model: malformed tree node");
      nodes.push_back(RegressionTree::Node{n[0].get<int>(), n[1].get<double>(), n[2].get<int>(), n[3].get<int>(),
                                           n[4].get<double>()});
    }
    s.trees.emplace_back(std::move(nodes));
  }
  return Predictor(std::move(s));
}

Json to_json(const SearchReport& report) {
  Json trials = Json::array();
  for (const auto& t : report.trials) {
    trials.push_back(Json{{"family", to_string(t.family)},
                          {"hyperparameters", to_json(t.hyperparameters)},
                          {"seed", t.seed},
                          {"validation_score", number(t.validation_score)}});
  }
  return Json{{"best_index", report.best_index},
              {"fit_rows", report.fit_rows},
              {"validation_rows", report.validation_rows},
              {"scored_in_sample", report.scored_in_sample},
              {"trials", std::move(trials)}};
}

Json to_json(const ImputationReport& r) {
  return Json{{"rows_imputed", r.rows_imputed},
              {"rows_skipped", r.rows_skipped},
              {"cells_filled", r.cells_filled},
              {"cells_unfillable", r.cells_unfillable},
              {"unfillable_columns", r.unfillable_columns},
              {"rank_deficient_fits", r.rank_deficient_fits},
              {"knn_shortfalls", r.knn_shortfalls},
              {"iterations_used", r.iterations_used},
              {"converged", r.converged}};
}

Json to_json(const SplitIndices& split) {
  return Json{{"train", index_list(split.train)}, {"test", index_list(split.test)}};
}

SplitIndices split_from_json(const Json& j) {
  SplitIndices s;
  s.train = field(j, "train").get<std::vector<Eigen::Index>>();
  s.test = field(j, "test").get<std::vector<Eigen::Index>>();
  return s;
}

Json to_json(const LimeConfig& c) {
  return Json{{"kernel_width", c.kernel_width}, {"n_samples", c.n_samples},       {"k_features", c.k_features},
              {"ridge_lambda", c.ridge_lambda}, {"seed", c.seed},                 {"standardize", c.standardize}};
}

LimeConfig lime_config_from_json(const Json& j) {
  LimeConfig c;
  c.kernel_width = field(j, "kernel_width").get<double>();
  c.n_samples = field(j, "n_samples").get<int>();
  c.k_features = field(j, "k_features").get<int>();
  c.ridge_lambda = field(j, "ridge_lambda").get<double>();
  c.seed = field(j, "seed").get<std::uint64_t>();
  c.standardize = field(j, "standardize").get<bool>();
  return c;
}

Json to_json(const FeatureStats& stats) {
  return Json{{"names", stats.names}, {"mean", vector_json(stats.mean)}, {"stddev", vector_json(stats.stddev)}};
}

FeatureStats feature_stats_from_json(const Json& j) {
  FeatureStats s;
  s.names = field(j, "names").get<std::vector<std::string>>();
  s.mean = vector_from(field(j, "mean"));
  s.stddev = vector_from(field(j, "stddev"));
  if (s.mean.size() != s.stddev.size() || s.mean.size() != static_cast<Eigen::Index>(s.names.size())) {
    throw DataError("feature stats: inconsistent lengths");
  }
  return s;
}

Json to_json(const Explanation& e) {
  Json features = Json::array();
  for (const auto& f : e.features) {
    features.push_back(Json{{"feature", f.feature}, {"name", f.name}, {"weight", f.weight}});
  }
  return Json{{"instance_id", e.instance_id},
              {"label", e.label},
              {"intercept", e.intercept},
              {"local_fit", number(e.local_fit)},
              {"features", std::move(features)},
              {"model_prediction", number(e.model_prediction)},
              {"local_prediction", number(e.local_prediction)},
              {"target", number(e.target)},
              {"config", to_json(e.config)}};
}

Explanation explanation_from_json(const Json& j) {
  Explanation e;
  e.instance_id = field(j, "instance_id").get<std::int64_t>();
  e.label = j.value("label", "");
  e.intercept = field(j, "intercept").get<double>();
  e.local_fit = number_from(field(j, "local_fit"));
  for (const auto& f : field(j, "features")) {
    e.features.push_back(FeatureWeight{field(f, "feature").get<Eigen::Index>(), field(f, "name").get<std::string>(),
                                       field(f, "weight").get<double>()});
  }
  e.model_prediction = number_from(j.value("model_prediction", Json(nullptr)));
  e.local_prediction = number_from(j.value("local_prediction", Json(nullptr)));
  e.target = number_from(j.value("target", Json(nullptr)));
  if (j.contains("config")) e.config = lime_config_from_json(j.at("config"));
  return e;
}

Json to_json(std::span<const Explanation> explanations) {
  Json out = Json::array();
  for (const auto& e : explanations) out.push_back(to_json(e));
  return out;
}

std::vector<Explanation> explanations_from_json(const Json& j) {
  if (!j.is_array()) throw DataError("explanations: expected a JSON array");
  std::vector<Explanation> out;
  for (const auto& e : j) out.push_back(explanation_from_json(e));
  return out;
}

Json to_json(const WeightMatrix& w) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < w.rows(); ++i) rows.push_back(vector_json(w.weights.row(i).transpose()));
  return Json{{"instance_ids", w.instance_ids}, {"feature_names", w.feature_names}, {"weights", std::move(rows)}};
}

Json to_json(const PickSelection& pick) {
  return Json{{"budget", pick.budget},
              {"mode", to_string(pick.mode)},
              {"instance_ids", pick.instance_ids},
              {"rows", index_list(pick.rows)},
              {"coverage", pick.coverage}};
}

Json to_json(const EvalReport& r) {
  Json runs = Json::array();
  for (const auto& run : r.runs) {
    Json names = Json::array();
    for (const auto c : run.random_columns) {
      names.push_back(static_cast<std::size_t>(c) < r.feature_names.size() ? r.feature_names[c] : std::to_string(c));
    }
    runs.push_back(Json{{"r2_lime", number(run.r2_lime)},
                        {"r2_random", number(run.r2_random)},
                        {"random_columns", std::move(names)}});
  }
  return Json{{"k_columns", r.k_columns},
              {"n_instances", r.n_instances},
              {"seed", r.seed},
              {"r2_full_model", number(r.r2_full_model)},
              {"mean_r2_lime", number(r.mean_r2_lime())},
              {"mean_r2_random", number(r.mean_r2_random())},
              {"t_statistic", number(r.t_statistic)},
              {"p_value", number(r.p_value)},
              {"df", r.df},
              {"failed_explanations", r.failed_explanations},
              {"runs", std::move(runs)}};
}

Json to_json(const EntityCodebook& codebook) {
  Json out = Json::array();
  for (std::size_t i = 0; i < codebook.size(); ++i) {
    out.push_back(Json{{"code", i}, {"name", codebook.names()[i]}});
  }
  return out;
}

std::string dump_json(const Json& j) { return j.dump(2) + "\n"; }

void write_json_file(const std::filesystem::path& path, const Json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << dump_json(j);
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read " + path.string());
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

}  // namespace panellime
