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

#include "panellime/models.h"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>

#include "panellime/linear_solve.h"
#include "panellime/metrics.h"

namespace panellime {
namespace {

constexpr int kMaxBins = 256;

// Per-feature quantile binning. Bin b holds values in (cuts[b-1], cuts[b]].
class FeatureBins {
 public:
  explicit FeatureBins(const Eigen::MatrixXd& x)
      : n_rows_(x.rows()), bins_(static_cast<std::size_t>(x.rows() * x.cols())), cuts_(x.cols()) {
    std::vector<double> sorted(static_cast<std::size_t>(x.rows()));
    for (Eigen::Index f = 0; f < x.cols(); ++f) {
      for (Eigen::Index r = 0; r < x.rows(); ++r) sorted[r] = x(r, f);
      std::sort(sorted.begin(), sorted.end());
      sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
      auto& cuts = cuts_[f];
      const std::size_t u = sorted.size();
      if (u <= static_cast<std::size_t>(kMaxBins)) {
        for (std::size_t i = 1; i < u; ++i) cuts.push_back(0.5 * (sorted[i - 1] + sorted[i]));
      } else {
        for (std::size_t q = 1; q < static_cast<std::size_t>(kMaxBins); ++q) {
          const std::size_t i = q * u / kMaxBins;
          const double cut = 0.5 * (sorted[i - 1] + sorted[i]);
          if (cuts.empty() || cut > cuts.back()) cuts.push_back(cut);
        }
      }
      for (Eigen::Index r = 0; r < x.rows(); ++r) {
        const auto it = std::lower_bound(cuts.begin(), cuts.end(), x(r, f));
        bins_[static_cast<std::size_t>(f * n_rows_ + r)] = static_cast<std::uint8_t>(it - cuts.begin());
      }
    }
  }

  std::uint8_t bin(Eigen::Index row, Eigen::Index feature) const {
    return bins_[static_cast<std::size_t>(feature * n_rows_ + row)];
  }
  const std::vector<double>& cuts(Eigen::Index feature) const { return cuts_[feature]; }
  Eigen::Index n_features() const { return static_cast<Eigen::Index>(cuts_.size()); }

 private:
  Eigen::Index n_rows_;
  std::vector<std::uint8_t> bins_;
  std::vector<std::vector<double>> cuts_;
};

class TreeGrower {
 public:
  TreeGrower(const FeatureBins& bins, const Eigen::VectorXd& target, const TreeOptions& options,
             Rng& rng)
      : bins_(bins), target_(target), options_(options), rng_(rng) {
    features_.resize(static_cast<std::size_t>(bins.n_features()));
    std::iota(features_.begin(), features_.end(), Eigen::Index{0});
    const double frac = std::clamp(options.max_features, 0.0, 1.0);
    n_candidates_ = std::clamp<Eigen::Index>(
        static_cast<Eigen::Index>(std::llround(frac * static_cast<double>(features_.size()))), 1,
        std::max<Eigen::Index>(static_cast<Eigen::Index>(features_.size()), 1));
  }

  RegressionTree grow(std::vector<Eigen::Index> rows) {
    rows_ = std::move(rows);
    nodes_.clear();
    build(0, rows_.size(), 0);
    return RegressionTree(std::move(nodes_));
  }

 private:
  struct Split {
    Eigen::Index feature = -1;
    int bin = -1;
    double gain = 0.0;
  };

  int build(std::size_t begin, std::size_t end, int depth) {
    const auto m = static_cast<double>(end - begin);
    double sum = 0.0, sumsq = 0.0;
    for (std::size_t i = begin; i < end; ++i) {
      const double g = target_(rows_[i]);
      sum += g;
      sumsq += g * g;
    }
    const int index = static_cast<int>(nodes_.size());
    nodes_.push_back(RegressionTree::Node{-1, 0.0, -1, -1, sum / m});

    const auto min_leaf = static_cast<std::size_t>(std::max(options_.min_samples_leaf, 1));
    const double sse = sumsq - sum * sum / m;
    if (depth >= options_.max_depth || end - begin < 2 * min_leaf || !(sse > 0.0)) return index;

    const Split split = best_split(begin, end, sum, sse, min_leaf);
    if (split.feature < 0) return index;

    const auto mid = std::partition(rows_.begin() + static_cast<std::ptrdiff_t>(begin),
                                    rows_.begin() + static_cast<std::ptrdiff_t>(end),
                                    [&](Eigen::Index r) { return bins_.bin(r, split.feature) <= split.bin; });
    const auto mid_index = static_cast<std::size_t>(mid - rows_.begin());
    const int left = build(begin, mid_index, depth + 1);
    const int right = build(mid_index, end, depth + 1);
    auto& node = nodes_[static_cast<std::size_t>(index)];
    node.feature = static_cast<int>(split.feature);
    node.threshold = bins_.cuts(split.feature)[static_cast<std::size_t>(split.bin)];
    node.left = left;
    node.right = right;
    return index;
  }

  Split best_split(std::size_t begin, std::size_t end, double sum, double sse, std::size_t min_leaf) {
    const auto n = static_cast<double>(end - begin);
    const double parent_score = sum * sum / n;
    const auto n_features = static_cast<Eigen::Index>(features_.size());
    // Partial Fisher-Yates: the first n_candidates_ entries are the sample.
    if (n_candidates_ < n_features) {
      std::iota(features_.begin(), features_.end(), Eigen::Index{0});
      for (Eigen::Index i = 0; i < n_candidates_; ++i) {
        const auto j = i + static_cast<Eigen::Index>(rng_.index(static_cast<std::uint64_t>(n_features - i)));
        std::swap(features_[i], features_[j]);
      }
    }
    Split best;
    best.gain = 1e-12 * sse;
    for (Eigen::Index fi = 0; fi < n_candidates_; ++fi) {
      const Eigen::Index f = features_[fi];
      touched_.clear();
      for (std::size_t i = begin; i < end; ++i) {
        const Eigen::Index r = rows_[i];
        const std::uint8_t b = bins_.bin(r, f);
        if (counts_[b]++ == 0) touched_.push_back(b);
        sums_[b] += target_(r);
      }
      std::sort(touched_.begin(), touched_.end());

      auto consider = [&](std::size_t left_count, double left_sum, int bin) {
        const std::size_t right_count = (end - begin) - left_count;
        if (left_count < min_leaf || right_count < min_leaf) return;
        const double right_sum = sum - left_sum;
        const double score = left_sum * left_sum / static_cast<double>(left_count) +
                             right_sum * right_sum / static_cast<double>(right_count);
        const double gain = score - parent_score;
        if (gain > best.gain) best = Split{f, bin, gain};
      };

      if (touched_.size() >= 2) {
        if (options_.random_splits) {
          const auto k = static_cast<std::size_t>(rng_.index(touched_.size() - 1));
          std::size_t left_count = 0;
          double left_sum = 0.0;
          for (std::size_t t = 0; t <= k; ++t) {
            left_count += counts_[touched_[t]];
            left_sum += sums_[touched_[t]];
          }
          consider(left_count, left_sum, touched_[k]);
        } else {
          std::size_t left_count = 0;
          double left_sum = 0.0;
          for (std::size_t t = 0; t + 1 < touched_.size(); ++t) {
            left_count += counts_[touched_[t]];
            left_sum += sums_[touched_[t]];
            consider(left_count, left_sum, touched_[t]);
          }
        }
      }
      for (const auto b : touched_) {
        counts_[b] = 0;
        sums_[b] = 0.0;
      }
    }
    if (best.feature < 0) return Split{};
    return best;
  }

  const FeatureBins& bins_;
  const Eigen::VectorXd& target_;
  TreeOptions options_;
  Rng& rng_;
  std::vector<Eigen::Index> features_;
  Eigen::Index n_candidates_ = 1;
  std::vector<Eigen::Index> rows_;
  std::vector<RegressionTree::Node> nodes_;
  std::array<std::size_t, kMaxBins> counts_{};
  std::array<double, kMaxBins> sums_{};
  std::vector<std::uint8_t> touched_;
};

TreeOptions tree_options(const Hyperparameters& hp, bool random_splits) {
  TreeOptions o;
  o.max_depth = hp.max_depth;
  o.min_samples_leaf = hp.min_samples_leaf;
  o.max_features = hp.max_features;
  o.random_splits = random_splits;
  return o;
}

std::vector<Eigen::Index> all_rows(Eigen::Index n) {
  std::vector<Eigen::Index> rows(static_cast<std::size_t>(n));
  std::iota(rows.begin(), rows.end(), Eigen::Index{0});
  return rows;
}

Predictor fit_forest(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, Predictor::State state,
                     bool extra_trees) {
  const FeatureBins bins(x);
  const Hyperparameters& hp = state.hyperparameters;
  const Eigen::Index n = x.rows();
  const auto bootstrap_size = std::max<Eigen::Index>(
      1, static_cast<Eigen::Index>(std::llround(std::clamp(hp.subsample, 0.0, 1.0) * static_cast<double>(n))));
  const TreeOptions options = tree_options(hp, extra_trees);
  const int n_trees = std::max(hp.n_trees, 1);
  for (int t = 0; t < n_trees; ++t) {
    Rng rng(derive_seed(state.training_seed, static_cast<std::uint64_t>(t)));
    std::vector<Eigen::Index> rows;
    if (extra_trees) {
      rows = all_rows(n);
    } else {
      rows.resize(static_cast<std::size_t>(bootstrap_size));
      for (auto& r : rows) r = static_cast<Eigen::Index>(rng.index(static_cast<std::uint64_t>(n)));
    }
    TreeGrower grower(bins, y, options, rng);
    state.trees.push_back(grower.grow(std::move(rows)));
  }
  state.base = 0.0;
  state.tree_scale = 1.0 / static_cast<double>(n_trees);
  return Predictor(std::move(state));
}

Predictor fit_boosting(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, Predictor::State state) {
  const FeatureBins bins(x);
  const Hyperparameters& hp = state.hyperparameters;
  const Eigen::Index n = x.rows();
  const TreeOptions options = tree_options(hp, false);
  const double subsample = std::clamp(hp.subsample, 0.0, 1.0);
  const auto sample_size = std::max<Eigen::Index>(
      1, static_cast<Eigen::Index>(std::llround(subsample * static_cast<double>(n))));

  state.base = y.mean();
  state.tree_scale = 1.0;
  Eigen::VectorXd current = Eigen::VectorXd::Constant(n, state.base);
  Eigen::VectorXd residual(n);
  for (int t = 0; t < std::max(hp.n_trees, 1); ++t) {
    Rng rng(derive_seed(state.training_seed, static_cast<std::uint64_t>(t)));
    residual = y - current;
    std::vector<Eigen::Index> rows = all_rows(n);
    if (sample_size < n) {
      rng.shuffle(rows);
      rows.resize(static_cast<std::size_t>(sample_size));
      std::sort(rows.begin(), rows.end());
    }
    TreeGrower grower(bins, residual, options, rng);
    RegressionTree tree = grower.grow(std::move(rows));
    std::vector<RegressionTree::Node> nodes = tree.nodes();
    for (auto& node : nodes) node.value *= hp.learning_rate;
    tree = RegressionTree(std::move(nodes));
    for (Eigen::Index r = 0; r < n; ++r) current(r) += tree.predict_row(x.row(r));
    state.trees.push_back(std::move(tree));
  }
  return Predictor(std::move(state));
}

Predictor fit_linear(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, Predictor::State state) {
  const auto fit = weighted_ridge(x, y, Eigen::VectorXd::Ones(x.rows()), std::max(state.hyperparameters.l2, 0.0));
  state.base = fit.intercept;
  state.coefficients = fit.coefficients;
  return Predictor(std::move(state));
}

double validation_score(const Eigen::VectorXd& y, const Eigen::VectorXd& pred) {
  // With a constant validation target R^2 is undefined; all trials share the
  // validation rows, so negative MSE still ranks them.
  const double mean = y.mean();
  if (!((y.array() - mean).square().sum() > 0.0)) return -mean_squared_error(y, pred);
  return r_squared(y, pred);
}

Eigen::MatrixXd take_rows(const Eigen::MatrixXd& x, const std::vector<Eigen::Index>& rows) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), x.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = x.row(rows[i]);
  return out;
}

Eigen::VectorXd take_rows(const Eigen::VectorXd& y, const std::vector<Eigen::Index>& rows) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) out(static_cast<Eigen::Index>(i)) = y(rows[i]);
  return out;
}

}  // namespace

const char* to_string(ModelFamily family) {
  switch (family) {
    case ModelFamily::random_forest: return "random_forest";
    case ModelFamily::extra_trees: return "extra_trees";
    case ModelFamily::gradient_boosting: return "gradient_boosting";
    case ModelFamily::linear: return "linear";
  }
  return "unknown";
}

ModelFamily parse_model_family(std::string_view name) {
  if (name == "random_forest") return ModelFamily::random_forest;
  if (name == "extra_trees") return ModelFamily::extra_trees;
  if (name == "gradient_boosting") return ModelFamily::gradient_boosting;
  if (name == "linear") return ModelFamily::linear;
  throw std::invalid_argument("unknown model family: " + std::string(name));
}

RegressionTree::RegressionTree(std::vector<Node> nodes) : nodes_(std::move(nodes)) {
  if (nodes_.empty()) throw std::invalid_argument("RegressionTree: no nodes");
  const int n = static_cast<int>(nodes_.size());
  for (const auto& node : nodes_) {
    if (node.feature >= 0 && (node.left <= 0 || node.left >= n || node.right <= 0 || node.right >= n)) {
      throw std::invalid_argument("RegressionTree: child index out of range");
    }
  }
}

int RegressionTree::depth() const {
  std::vector<std::pair<int, int>> stack{{0, 0}};
  int deepest = 0;
  while (!stack.empty()) {
    const auto [i, d] = stack.back();
    stack.pop_back();
    deepest = std::max(deepest, d);
    if (nodes_[i].feature >= 0) {
      stack.emplace_back(nodes_[i].left, d + 1);
      stack.emplace_back(nodes_[i].right, d + 1);
    }
  }
  return deepest;
}

RegressionTree grow_tree(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                         const std::vector<Eigen::Index>& rows, const TreeOptions& options,
                         Rng& rng) {
  if (rows.empty()) throw std::invalid_argument("grow_tree: no rows");
  const FeatureBins bins(x);
  TreeGrower grower(bins, y, options, rng);
  return grower.grow(rows);
}

Predictor::Predictor(State state) : state_(std::move(state)) {
  if (state_.coefficients.size() != 0 && state_.coefficients.size() != n_features()) {
    throw std::invalid_argument("Predictor: coefficient count does not match features");
  }
}

Predictor Predictor::constant(double value, ModelFamily family,
                              std::vector<std::string> feature_names, std::uint64_t seed) {
  State s;
  s.family = family;
  s.feature_names = std::move(feature_names);
  s.training_seed = seed;
  s.base = value;
  return Predictor(std::move(s));
}

Eigen::VectorXd Predictor::predict(const Eigen::Ref<const Eigen::MatrixXd>& rows) const {
  return predict_staged(rows, state_.trees.size());
}

Eigen::VectorXd Predictor::predict_staged(const Eigen::Ref<const Eigen::MatrixXd>& rows,
                                          std::size_t n_trees) const {
  if (rows.cols() != n_features()) {
    throw std::invalid_argument("predict: expected " + std::to_string(n_features()) +
                                " features, got " + std::to_string(rows.cols()));
  }
  const Eigen::Index n = rows.rows();
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(n);
  const std::size_t used = std::min(n_trees, state_.trees.size());
  for (std::size_t t = 0; t < used; ++t) {
    const RegressionTree& tree = state_.trees[t];
    for (Eigen::Index r = 0; r < n; ++r) sum(r) += tree.predict_row(rows.row(r));
  }
  Eigen::VectorXd out = (sum * state_.tree_scale).array() + state_.base;
  if (state_.coefficients.size() > 0) out.noalias() += rows * state_.coefficients;
  return out;
}

Predictor fit(ModelFamily family, const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
              std::vector<std::string> feature_names, const Hyperparameters& hyperparameters,
              std::uint64_t seed) {
  if (x.rows() != y.size()) throw std::invalid_argument("fit: row count mismatch");
  if (x.rows() < 2) throw std::invalid_argument("fit: at least two training rows required");
  if (static_cast<Eigen::Index>(feature_names.size()) != x.cols()) {
    throw std::invalid_argument("fit: one feature name per column required");
  }
  if (x.hasNaN() || y.hasNaN()) throw DataError("fit: training data contain missing cells");

  Predictor::State state;
  state.family = family;
  state.feature_names = std::move(feature_names);
  state.training_seed = seed;
  state.hyperparameters = hyperparameters;

  const double mean = y.mean();
  if (!((y.array() - mean).square().sum() > 0.0)) {
    log_warning("fit: target has zero variance; returning a constant predictor");
    state.base = mean;
    return Predictor(std::move(state));
  }
  switch (family) {
    case ModelFamily::random_forest: return fit_forest(x, y, std::move(state), false);
    case ModelFamily::extra_trees: return fit_forest(x, y, std::move(state), true);
    case ModelFamily::gradient_boosting: return fit_boosting(x, y, std::move(state));
    case ModelFamily::linear: return fit_linear(x, y, std::move(state));
  }
  throw std::invalid_argument("fit: unknown family");
}

Predictor fit(ModelFamily family, const DataTable& train, const Hyperparameters& hyperparameters,
              std::uint64_t seed) {
  return fit(family, train.feature_matrix(), train.target_vector(), train.feature_names(),
             hyperparameters, seed);
}

void SearchConfig::validate() const {
  if (time_budget_seconds < 0.0) throw std::invalid_argument("search: negative time budget");
  if (time_budget_seconds == 0.0 && max_trials < 1) {
    throw std::invalid_argument("search: trial budget must be positive");
  }
  if (families.empty()) throw std::invalid_argument("search: no candidate families");
  if (metric != "r_squared" && metric != "r2") {
    throw std::invalid_argument("search: unsupported metric '" + metric + "'");
  }
  if (!(validation_fraction > 0.0 && validation_fraction < 1.0)) {
    throw std::invalid_argument("search: validation_fraction must lie in (0, 1)");
  }
}

Hyperparameters sample_hyperparameters(ModelFamily family, Rng& rng) {
  Hyperparameters hp;
  hp.n_trees = static_cast<int>(std::lround(std::exp(rng.uniform(std::log(50.0), std::log(500.0)))));
  hp.max_depth = 2 + static_cast<int>(rng.index(11));
  hp.learning_rate = std::exp(rng.uniform(std::log(0.01), std::log(0.3)));
  hp.subsample = rng.uniform(0.5, 1.0);
  hp.max_features = rng.uniform(0.3, 1.0);
  hp.min_samples_leaf = static_cast<int>(std::lround(std::exp(rng.uniform(0.0, std::log(10.0)))));
  hp.l2 = std::exp(rng.uniform(std::log(1e-6), std::log(1.0)));
  if (family == ModelFamily::random_forest) hp.learning_rate = 1.0;
  return hp;
}

SearchResult budgeted_search(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                             const std::vector<std::string>& feature_names,
                             const SearchConfig& config) {
  config.validate();
  const Eigen::Index n = x.rows();
  if (n < 2 || y.size() != n) throw std::invalid_argument("search: at least two training rows required");

  SearchReport report;
  std::vector<Eigen::Index> fit_idx, val_idx;
  const auto n_val = static_cast<Eigen::Index>(std::llround(config.validation_fraction * static_cast<double>(n)));
  if (n_val < 2 || n - n_val < 2) {
    fit_idx = all_rows(n);
    val_idx = fit_idx;
    report.scored_in_sample = true;
    log_warning("search: too few rows for a validation split; scoring trials in-sample");
  } else {
    const SplitIndices parts = split_indices(n, SplitSpec{1.0 - config.validation_fraction, derive_seed(config.seed, 1)});
    fit_idx = parts.train;
    val_idx = parts.test;
  }
  const Eigen::MatrixXd x_fit = take_rows(x, fit_idx), x_val = take_rows(x, val_idx);
  const Eigen::VectorXd y_fit = take_rows(y, fit_idx), y_val = take_rows(y, val_idx);
  report.fit_rows = x_fit.rows();
  report.validation_rows = x_val.rows();

  const bool wall_clock = config.time_budget_seconds > 0.0;
  using Clock = std::chrono::steady_clock;
  const auto deadline = Clock::now() + std::chrono::duration_cast<Clock::duration>(
                                           std::chrono::duration<double>(config.time_budget_seconds));
  Rng rng(derive_seed(config.seed, 2));
  for (int i = 0;; ++i) {
    if (config.max_trials > 0 && i >= config.max_trials) break;
    if (wall_clock && Clock::now() >= deadline) break;
    SearchTrial trial;
    trial.family = config.families[rng.index(config.families.size())];
    trial.hyperparameters = sample_hyperparameters(trial.family, rng);
    trial.seed = derive_seed(config.seed, 1000 + static_cast<std::uint64_t>(i));
    const Predictor model = fit(trial.family, x_fit, y_fit, feature_names, trial.hyperparameters, trial.seed);
    trial.validation_score = validation_score(y_val, model.predict(x_val));
    if (wall_clock && Clock::now() > deadline) break;
    report.trials.push_back(trial);
  }
  if (report.trials.empty()) {
    throw SearchBudgetExhausted("search: budget exhausted before any trial completed", report);
  }
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < report.trials.size(); ++i) {
    const double s = report.trials[i].validation_score;
    if (s > best) {
      best = s;
      report.best_index = i;
    }
  }
  const SearchTrial& winner = report.trials[report.best_index];
  Predictor model = fit(winner.family, x, y, feature_names, winner.hyperparameters, winner.seed);
  return SearchResult{std::move(model), std::move(report)};
}

SearchResult budgeted_search(const DataTable& train, const SearchConfig& config) {
  return budgeted_search(train.feature_matrix(), train.target_vector(), train.feature_names(), config);
}

}  // namespace panellime
