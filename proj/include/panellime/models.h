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

// Black-box regressors and a budgeted random hyperparameter search.
//
// Tree ensembles are grown on histogram-binned features (at most 256 bins per
// feature, cut points halfway between neighbouring training values) and
// evaluated on raw feature values.

#ifndef PANELLIME_MODELS_H_
#define PANELLIME_MODELS_H_

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "panellime/common.h"
#include "panellime/data_table.h"

namespace panellime {

enum class ModelFamily { random_forest, extra_trees, gradient_boosting, linear };

const char* to_string(ModelFamily family);
ModelFamily parse_model_family(std::string_view name);

struct Hyperparameters {
  int n_trees = 100;
  int max_depth = 6;
  // Boosting shrinkage.
  double learning_rate = 0.1;
  // Row fraction per tree: bootstrap size for random forests, sampling
  // without replacement for boosting. Extra trees use every row.
  double subsample = 1.0;
  // Fraction of features considered at each split.
  double max_features = 1.0;
  int min_samples_leaf = 1;
  // Ridge penalty of the linear family.
  double l2 = 0.0;
};

class RegressionTree {
 public:
  struct Node {
    // Negative for leaves.
    int feature = -1;
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    double value = 0.0;
  };

  RegressionTree() = default;
  explicit RegressionTree(std::vector<Node> nodes);

  const std::vector<Node>& nodes() const { return nodes_; }
  int depth() const;

  // Rows with x[feature] <= threshold go left.
  template <typename Derived>
  double predict_row(const Eigen::DenseBase<Derived>& row) const {
    int i = 0;
    while (nodes_[i].feature >= 0) {
      const Node& n = nodes_[i];
      i = row(n.feature) <= n.threshold ? n.left : n.right;
    }
    return nodes_[i].value;
  }

 private:
  std::vector<Node> nodes_{Node{}};
};

struct TreeOptions {
  int max_depth = 6;
  int min_samples_leaf = 1;
  double max_features = 1.0;
  // Extremely randomized trees: one random cut per candidate feature.
  bool random_splits = false;
};

// Least-squares CART on `rows` (repeats allowed, e.g. a bootstrap sample).
RegressionTree grow_tree(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                         const std::vector<Eigen::Index>& rows, const TreeOptions& options,
                         Rng& rng);

// Prediction is a pure function of the stored state and the input row.
class Predictor {
 public:
  struct State {
    ModelFamily family = ModelFamily::linear;
    std::vector<std::string> feature_names;
    std::uint64_t training_seed = 0;
    Hyperparameters hyperparameters;
    // prediction = base + tree_scale * sum(trees) + coefficients . x
    double base = 0.0;
    double tree_scale = 1.0;
    std::vector<RegressionTree> trees;
    Eigen::VectorXd coefficients;
  };

  Predictor() = default;
  explicit Predictor(State state);

  static Predictor constant(double value, ModelFamily family, std::vector<std::string> feature_names,
                            std::uint64_t seed = 0);

  const State& state() const { return state_; }
  ModelFamily family() const { return state_.family; }
  const std::vector<std::string>& feature_names() const { return state_.feature_names; }
  Eigen::Index n_features() const { return static_cast<Eigen::Index>(state_.feature_names.size()); }
  std::uint64_t training_seed() const { return state_.training_seed; }
  const Hyperparameters& hyperparameters() const { return state_.hyperparameters; }

  // One prediction per row; throws std::invalid_argument on a width mismatch.
  Eigen::VectorXd predict(const Eigen::Ref<const Eigen::MatrixXd>& rows) const;

  // Prediction using only the first `n_trees` trees.
  Eigen::VectorXd predict_staged(const Eigen::Ref<const Eigen::MatrixXd>& rows,
                                 std::size_t n_trees) const;

 private:
  State state_;
};

// Throws DataError if `x` or `y` contain missing cells. A zero-variance target
// gives a constant predictor (with a warning).
Predictor fit(ModelFamily family, const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
              std::vector<std::string> feature_names, const Hyperparameters& hyperparameters,
              std::uint64_t seed);
Predictor fit(ModelFamily family, const DataTable& train, const Hyperparameters& hyperparameters,
              std::uint64_t seed);

struct SearchConfig {
  // Trial budget. In wall-clock mode this is an upper bound (0 = unbounded).
  int max_trials = 25;
  // Wall-clock budget in seconds; 0 selects the deterministic trial budget.
  double time_budget_seconds = 0.0;
  std::vector<ModelFamily> families = {ModelFamily::random_forest, ModelFamily::extra_trees,
                                       ModelFamily::gradient_boosting};
  std::string metric = "r_squared";
  std::uint64_t seed = 0;
  double validation_fraction = 0.2;

  void validate() const;
};

struct SearchTrial {
  ModelFamily family = ModelFamily::linear;
  Hyperparameters hyperparameters;
  std::uint64_t seed = 0;
  double validation_score = 0.0;
};

struct SearchReport {
  std::vector<SearchTrial> trials;
  std::size_t best_index = 0;
  // Rows used for fitting and for scoring during the search.
  Eigen::Index fit_rows = 0;
  Eigen::Index validation_rows = 0;
  // True when the training data were too small to hold out a validation set
  // and trials were scored on the fitting rows.
  bool scored_in_sample = false;
};

class SearchBudgetExhausted : public std::runtime_error {
 public:
  SearchBudgetExhausted(const std::string& what, SearchReport partial)
      : std::runtime_error(what), partial_(std::move(partial)) {}
  const SearchReport& partial_report() const { return partial_; }

 private:
  SearchReport partial_;
};

struct SearchResult {
  Predictor model;
  SearchReport report;
};

// Draws a configuration from the search space: 50-500 trees (log-uniform),
// depth 2-12, learning rate 0.01-0.3 (log-uniform), subsample 0.5-1.0,
// feature fraction 0.3-1.0, 1-10 samples per leaf.
Hyperparameters sample_hyperparameters(ModelFamily family, Rng& rng);

// Random search over family x hyperparameters scored by validation R^2. The
// winning configuration is refit on all of `x`.
SearchResult budgeted_search(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                             const std::vector<std::string>& feature_names,
                             const SearchConfig& config);
SearchResult budgeted_search(const DataTable& train, const SearchConfig& config);

}  // namespace panellime

#endif  // PANELLIME_MODELS_H_
