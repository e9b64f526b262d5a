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

#include "panellime/global_explanations.h"

#include <algorithm>
#include <numeric>

namespace panellime {

WeightMatrix WeightMatrix::from_explanations(std::span<const Explanation> explanations,
                                             std::vector<std::string> feature_names) {
  WeightMatrix m;
  const auto n_features = static_cast<Eigen::Index>(feature_names.size());
  m.weights.resize(static_cast<Eigen::Index>(explanations.size()), n_features);
  for (std::size_t i = 0; i < explanations.size(); ++i) {
    for (const auto& f : explanations[i].features) {
      if (f.feature < 0 || f.feature >= n_features) {
        throw std::out_of_range("WeightMatrix: feature id outside the feature list");
      }
    }
    m.weights.row(static_cast<Eigen::Index>(i)) = explanations[i].dense_weights(n_features).transpose();
    m.instance_ids.push_back(explanations[i].instance_id);
  }
  m.feature_names = std::move(feature_names);
  return m;
}

const char* to_string(CoverageMode mode) {
  return mode == CoverageMode::absolute ? "abs" : "positive";
}

CoverageMode parse_coverage_mode(std::string_view name) {
  if (name == "abs" || name == "absolute") return CoverageMode::absolute;
  if (name == "positive" || name == "literal") return CoverageMode::positive;
  throw std::invalid_argument("unknown coverage mode: " + std::string(name));
}

PickSelection greedy_pick(const Eigen::MatrixXd& w, const Eigen::VectorXd& importance, int budget,
                          CoverageMode mode) {
  if (budget < 1) throw std::invalid_argument("greedy_pick: budget must be at least 1");
  if (importance.size() != w.cols()) throw std::invalid_argument("greedy_pick: importance width mismatch");
  PickSelection pick;
  pick.budget = budget;
  pick.mode = mode;
  std::vector<bool> covered(static_cast<std::size_t>(w.cols()), false);
  std::vector<bool> chosen(static_cast<std::size_t>(w.rows()), false);
  while (static_cast<int>(pick.rows.size()) < budget) {
    Eigen::Index best = -1;
    double best_gain = 0.0;
    for (Eigen::Index i = 0; i < w.rows(); ++i) {
      if (chosen[static_cast<std::size_t>(i)]) continue;
      double gain = 0.0;
      for (Eigen::Index j = 0; j < w.cols(); ++j) {
        if (!covered[static_cast<std::size_t>(j)] && touches(w(i, j), mode)) gain += importance(j);
      }
      if (gain > best_gain) {
        best_gain = gain;
        best = i;
      }
    }
    if (best < 0) break;
    chosen[static_cast<std::size_t>(best)] = true;
    pick.rows.push_back(best);
    for (Eigen::Index j = 0; j < w.cols(); ++j) {
      if (touches(w(best, j), mode)) covered[static_cast<std::size_t>(j)] = true;
    }
  }
  pick.coverage = coverage(std::span<const Eigen::Index>(pick.rows), w, importance, mode);
  return pick;
}

PickSelection greedy_pick(const WeightMatrix& w, int budget, CoverageMode mode) {
  PickSelection pick = greedy_pick(w.weights, global_importance(w.weights), budget, mode);
  for (const Eigen::Index r : pick.rows) {
    pick.instance_ids.push_back(w.instance_ids.at(static_cast<std::size_t>(r)));
  }
  return pick;
}

std::vector<FeatureFrequency> selection_frequency(std::span<const Explanation> explanations, int top_k) {
  if (top_k < 1) throw std::invalid_argument("selection_frequency: top_k must be at least 1");
  std::vector<FeatureFrequency> table;
  auto entry = [&table](const FeatureWeight& f) -> FeatureFrequency& {
    for (auto& e : table) {
      if (e.feature == f.feature) return e;
    }
    table.push_back(FeatureFrequency{f.feature, f.name, 0, 0.0});
    return table.back();
  };
  for (const auto& e : explanations) {
    std::vector<FeatureWeight> ranked = e.features;
    std::stable_sort(ranked.begin(), ranked.end(), [](const FeatureWeight& a, const FeatureWeight& b) {
      return std::abs(a.weight) > std::abs(b.weight);
    });
    const std::size_t n = std::min(ranked.size(), static_cast<std::size_t>(top_k));
    for (std::size_t i = 0; i < n; ++i) {
      FeatureFrequency& f = entry(ranked[i]);
      ++f.count;
      f.total_abs_weight += std::abs(ranked[i].weight);
    }
  }
  std::sort(table.begin(), table.end(), [](const FeatureFrequency& a, const FeatureFrequency& b) {
    if (a.count != b.count) return a.count > b.count;
    if (a.total_abs_weight != b.total_abs_weight) return a.total_abs_weight > b.total_abs_weight;
    return a.feature < b.feature;
  });
  return table;
}

IceCurve ice_curves(const Predictor& model, const Eigen::MatrixXd& instances, Eigen::Index feature,
                    const Eigen::VectorXd& grid) {
  if (feature < 0 || feature >= instances.cols()) {
    throw std::out_of_range("ice_curves: feature " + std::to_string(feature) + " out of range");
  }
  if (grid.size() < 2) throw std::invalid_argument("ice_curves: grid needs at least two points");
  for (Eigen::Index g = 1; g < grid.size(); ++g) {
    if (grid(g) < grid(g - 1)) throw std::invalid_argument("ice_curves: grid must be ascending");
  }
  const double span = grid(grid.size() - 1) - grid(0);
  if (!(span > 0.0)) throw std::invalid_argument("ice_curves: grid spans a single value");
  if (instances.rows() == 0) throw std::invalid_argument("ice_curves: no instances");

  const Eigen::Index n = instances.rows();
  const Eigen::Index n_grid = grid.size();
  Eigen::MatrixXd sweep(n * n_grid, instances.cols());
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index g = 0; g < n_grid; ++g) {
      sweep.row(i * n_grid + g) = instances.row(i);
      sweep(i * n_grid + g, feature) = grid(g);
    }
  }
  const Eigen::VectorXd flat = model.predict(sweep);

  IceCurve curve;
  curve.feature = feature;
  if (feature < model.n_features()) curve.name = model.feature_names()[static_cast<std::size_t>(feature)];
  curve.grid = grid;
  curve.predictions = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
      flat.data(), n, n_grid);
  curve.pdp = curve.predictions.colwise().mean().transpose();
  curve.slope_scores = (curve.predictions.rowwise().maxCoeff() - curve.predictions.rowwise().minCoeff()) / span;
  curve.slope_score = curve.slope_scores.mean();
  return curve;
}

double percentile(const Eigen::Ref<const Eigen::VectorXd>& values, double p) {
  if (values.size() == 0) throw std::invalid_argument("percentile: no values");
  if (!(p >= 0.0 && p <= 100.0)) throw std::invalid_argument("percentile: p outside [0, 100]");
  std::vector<double> sorted(values.data(), values.data() + values.size());
  std::sort(sorted.begin(), sorted.end());
  const double pos = p / 100.0 * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

Eigen::VectorXd default_grid(const Eigen::Ref<const Eigen::VectorXd>& values, int n_points,
                             double lower_percentile, double upper_percentile) {
  if (n_points < 2) throw std::invalid_argument("default_grid: at least two points required");
  if (!(lower_percentile < upper_percentile)) throw std::invalid_argument("default_grid: empty percentile range");
  return Eigen::VectorXd::LinSpaced(n_points, percentile(values, lower_percentile),
                                    percentile(values, upper_percentile));
}

std::vector<SlopeScore> slope_rank(std::span<const IceCurve> curves) {
  std::vector<SlopeScore> ranked;
  for (const auto& c : curves) {
    if (c.grid.size() < 2 || !(c.grid(c.grid.size() - 1) > c.grid(0))) {
      throw std::invalid_argument("slope_rank: degenerate grid for feature " + c.name);
    }
    if (c.predictions.rows() != curves.front().predictions.rows()) {
      throw std::invalid_argument("slope_rank: curves were computed on different instance sets");
    }
    ranked.push_back(SlopeScore{c.feature, c.name, c.slope_score});
  }
  std::stable_sort(ranked.begin(), ranked.end(), [](const SlopeScore& a, const SlopeScore& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.feature < b.feature;
  });
  return ranked;
}

}  // namespace panellime
