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

// Masked-column experiments comparing LIME-selected features against random
// feature subsets, and the one-sided paired t-test used to compare them.

#ifndef PANELLIME_EVALUATION_H_
#define PANELLIME_EVALUATION_H_

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "panellime/data_table.h"
#include "panellime/lime.h"
#include "panellime/metrics.h"
#include "panellime/models.h"

namespace panellime {

// Copy of `rows` with every column outside `keep` set to 0.
template <typename Derived>
typename Derived::PlainObject mask_to_columns(const Eigen::MatrixBase<Derived>& rows,
                                              std::span<const Eigen::Index> keep) {
  if (keep.empty()) throw std::invalid_argument("mask_to_columns: keep set is empty");
  std::vector<bool> kept(static_cast<std::size_t>(rows.cols()), false);
  for (const Eigen::Index j : keep) {
    if (j < 0 || j >= rows.cols()) throw std::out_of_range("mask_to_columns: column " + std::to_string(j));
    kept[static_cast<std::size_t>(j)] = true;
  }
  typename Derived::PlainObject out = rows;
  for (Eigen::Index j = 0; j < rows.cols(); ++j) {
    if (!kept[static_cast<std::size_t>(j)]) out.col(j).setZero();
  }
  return out;
}

// I_x(a, b), evaluated by continued fraction.
double regularized_incomplete_beta(double a, double b, double x);

// P(T <= t) for Student's t with `df` degrees of freedom.
double student_t_cdf(double t, double df);

struct TTestResult {
  double t = 0.0;
  double p = 0.5;
  int df = 0;
};

// One-sided test of mean(a - b) > 0. When the differences have zero spread,
// p is 0 (mean > 0), 1 (mean < 0) or 0.5 (all differences zero) and t is
// +inf, -inf or 0.
TTestResult paired_t_test(std::span<const double> a, std::span<const double> b);

struct ExperimentConfig {
  int k = 3;
  int n_runs = 5;
  // Evaluate only the first max_instances test rows; 0 uses all of them.
  int max_instances = 0;
  std::uint64_t seed = 0;

  void validate() const;
};

struct EvalRun {
  double r2_lime = 0.0;
  double r2_random = 0.0;
  std::vector<Eigen::Index> random_columns;
};

struct EvalReport {
  std::vector<EvalRun> runs;
  double r2_full_model = 0.0;
  int k_columns = 0;
  int n_instances = 0;
  // Instances dropped because their explanation failed, summed over runs.
  int failed_explanations = 0;
  double t_statistic = 0.0;
  double p_value = 0.5;
  int df = 0;
  std::uint64_t seed = 0;
  std::vector<std::string> feature_names;

  double mean_r2_lime() const;
  double mean_r2_random() const;
};

// Per run: (a) explain each evaluated row, zero every column outside its top-k
// LIME features and score the pooled predictions; (b) zero every column outside
// k columns drawn uniformly without replacement and score again. The paired
// test compares (a) against (b) across runs. With k >= n_features nothing is
// masked.
EvalReport lime_vs_random_experiment(const Predictor& model, const Eigen::MatrixXd& x,
                                     const Eigen::VectorXd& y, const FeatureStats& stats,
                                     const LimeConfig& lime_config, const ExperimentConfig& config);
EvalReport lime_vs_random_experiment(const Predictor& model, const DataTable& test,
                                     const FeatureStats& stats, const LimeConfig& lime_config,
                                     const ExperimentConfig& config);

}  // namespace panellime

#endif  // PANELLIME_EVALUATION_H_
