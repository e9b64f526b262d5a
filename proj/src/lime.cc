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

#include "panellime/lime.h"

#include <algorithm>
#include <numeric>

#include "panellime/linear_solve.h"

namespace panellime {
namespace {

Eigen::MatrixXd take_columns(const Eigen::MatrixXd& m, const std::vector<Eigen::Index>& cols) {
  Eigen::MatrixXd out(m.rows(), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t j = 0; j < cols.size(); ++j) out.col(static_cast<Eigen::Index>(j)) = m.col(cols[j]);
  return out;
}

Eigen::VectorXd take(const Eigen::VectorXd& v, const std::vector<Eigen::Index>& idx) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(idx.size()));
  for (std::size_t j = 0; j < idx.size(); ++j) out(static_cast<Eigen::Index>(j)) = v(idx[j]);
  return out;
}

// Ranks `columns` by |coefficient| * std, descending, dropping zero scores.
std::vector<std::pair<double, Eigen::Index>> rank_by_effect(const Eigen::VectorXd& coefficients,
                                                            const std::vector<Eigen::Index>& columns,
                                                            const FeatureStats& stats) {
  std::vector<std::pair<double, Eigen::Index>> ranked;
  for (std::size_t j = 0; j < columns.size(); ++j) {
    const double score = std::abs(coefficients(static_cast<Eigen::Index>(j))) * stats.stddev(columns[j]);
    if (score > 0.0) ranked.emplace_back(score, columns[j]);
  }
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  return ranked;
}

}  // namespace

void LimeConfig::validate() const {
  if (k_features < 1) throw std::invalid_argument("lime: k_features must be at least 1");
  if (n_samples < k_features + 1) throw std::invalid_argument("lime: n_samples must exceed k_features");
  if (ridge_lambda < 0.0) throw std::invalid_argument("lime: ridge_lambda must be nonnegative");
}

FeatureStats FeatureStats::from_matrix(const Eigen::MatrixXd& x, std::vector<std::string> names) {
  if (x.rows() < 1) throw std::invalid_argument("FeatureStats: no rows");
  if (static_cast<Eigen::Index>(names.size()) != x.cols()) {
    throw std::invalid_argument("FeatureStats: one name per column required");
  }
  FeatureStats s;
  s.mean = x.colwise().mean().transpose();
  s.stddev = ((x.rowwise() - s.mean.transpose()).array().square().colwise().sum() /
              static_cast<double>(x.rows()))
                 .sqrt()
                 .transpose();
  s.names = std::move(names);
  return s;
}

Eigen::VectorXd FeatureStats::scale() const {
  return stddev.unaryExpr([](double s) { return s > 0.0 ? s : 1.0; });
}

Eigen::VectorXd Explanation::dense_weights(Eigen::Index n_features) const {
  Eigen::VectorXd w = Eigen::VectorXd::Zero(n_features);
  for (const auto& f : features) w(f.feature) = f.weight;
  return w;
}

Eigen::MatrixXd sample_neighborhood(const Eigen::Ref<const Eigen::VectorXd>& x,
                                    const FeatureStats& stats, int n, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("sample_neighborhood: n must be at least 1");
  if (x.size() != stats.size()) throw std::invalid_argument("sample_neighborhood: width mismatch");
  Rng rng(seed);
  Eigen::MatrixXd samples(n, x.size());
  samples.row(0) = x.transpose();
  for (int i = 1; i < n; ++i) {
    for (Eigen::Index j = 0; j < x.size(); ++j) {
      samples(i, j) = stats.is_constant(j) ? x(j) : rng.normal(stats.mean(j), stats.stddev(j));
    }
  }
  return samples;
}

Eigen::VectorXd kernel_weights(const Eigen::Ref<const Eigen::VectorXd>& x,
                               const Eigen::MatrixXd& samples, double width,
                               const Eigen::VectorXd& scale) {
  Eigen::VectorXd w(samples.rows());
  for (Eigen::Index i = 0; i < samples.rows(); ++i) {
    w(i) = kernel_weight(x, samples.row(i).transpose(), width, scale);
  }
  return w;
}

Explanation fit_local_model(const Eigen::MatrixXd& samples, const Eigen::VectorXd& weights,
                            const Eigen::VectorXd& black_box_predictions,
                            const FeatureStats& stats, const LimeConfig& config) {
  config.validate();
  const Eigen::Index n = samples.rows();
  if (weights.size() != n || black_box_predictions.size() != n || n == 0) {
    throw std::invalid_argument("fit_local_model: samples, weights and predictions differ in length");
  }
  if (samples.cols() != stats.size()) throw std::invalid_argument("fit_local_model: width mismatch");
  if ((weights.array() < 0.0).any()) throw std::invalid_argument("fit_local_model: negative weight");

  const double max_weight = weights.maxCoeff();
  const auto effective = (weights.array() > 1e-10 * max_weight).count();
  if (!(max_weight > 0.0) || effective < config.k_features + 1) {
    throw KernelTooNarrow("kernel width too narrow: only " + std::to_string(max_weight > 0.0 ? effective : 0) +
                          " samples carry weight; increase kernel_width");
  }
  // Normalized to sum to n, so that rescaling the kernel leaves the fit unchanged.
  const Eigen::VectorXd w = weights * (static_cast<double>(n) / weights.sum());
  const Eigen::VectorXd& y = black_box_predictions;

  Explanation e;
  e.config = config;
  e.model_prediction = y(0);
  if (y.maxCoeff() == y.minCoeff()) {
    e.intercept = y(0);
    e.local_prediction = y(0);
    return e;
  }

  std::vector<Eigen::Index> candidates;
  for (Eigen::Index j = 0; j < stats.size(); ++j) {
    if (!stats.is_constant(j)) candidates.push_back(j);
  }
  const Eigen::VectorXd scale = config.standardize ? stats.scale() : Eigen::VectorXd::Ones(stats.size());

  const auto full = weighted_ridge(take_columns(samples, candidates), y, w, config.ridge_lambda,
                                   take(scale, candidates));
  auto ranked = rank_by_effect(full.coefficients, candidates, stats);
  if (ranked.size() > static_cast<std::size_t>(config.k_features)) ranked.resize(config.k_features);
  std::vector<Eigen::Index> selected;
  for (const auto& [score, j] : ranked) selected.push_back(j);

  const Eigen::MatrixXd x_sel = take_columns(samples, selected);
  const auto local = weighted_ridge(x_sel, y, w, config.ridge_lambda, take(scale, selected));
  e.intercept = local.intercept;
  for (const auto& [score, j] : rank_by_effect(local.coefficients, selected, stats)) {
    const auto pos = std::find(selected.begin(), selected.end(), j) - selected.begin();
    e.features.push_back(FeatureWeight{j, stats.names[static_cast<std::size_t>(j)], local.coefficients(pos)});
  }

  const Eigen::VectorXd g = local.predict(x_sel);
  const double y_mean = w.dot(y) / w.sum();
  const double ss_tot = w.dot((y.array() - y_mean).square().matrix());
  const double ss_res = w.dot((y - g).array().square().matrix());
  e.local_fit = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : kMissing;
  e.local_prediction = g(0);
  return e;
}

Explanation explain(const Predictor& model, const Eigen::Ref<const Eigen::VectorXd>& x,
                    const FeatureStats& stats, const LimeConfig& config, std::int64_t instance_id) {
  config.validate();
  if (x.size() != model.n_features() || stats.size() != model.n_features()) {
    throw std::invalid_argument("explain: instance width does not match the model");
  }
  LimeConfig resolved = config;
  resolved.kernel_width = config.resolved_kernel_width(x.size());
  const Eigen::MatrixXd samples = sample_neighborhood(x, stats, config.n_samples, config.seed);
  const Eigen::VectorXd predictions = model.predict(samples);
  const Eigen::VectorXd scale = config.standardize ? stats.scale() : Eigen::VectorXd::Ones(stats.size());
  const Eigen::VectorXd weights = kernel_weights(x, samples, resolved.kernel_width, scale);
  Explanation e = fit_local_model(samples, weights, predictions, stats, resolved);
  e.instance_id = instance_id;
  return e;
}

}  // namespace panellime
