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

// Local surrogate explanations for tabular regressors.
//
// An explanation samples a Gaussian neighbourhood from training statistics,
// weights each sample by an exponential kernel on its distance to the
// explained instance, and fits a sparse weighted ridge model to the black
// box's predictions. Sparsity is a hard cap of K features: a ridge fit on all
// features ranks them by |coefficient| * std, and the top K are refit alone.

#ifndef PANELLIME_LIME_H_
#define PANELLIME_LIME_H_

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "panellime/common.h"
#include "panellime/models.h"

namespace panellime {

struct LimeConfig {
  // Kernel width; non-positive selects 0.75 * sqrt(n_features).
  double kernel_width = 0.0;
  int n_samples = 5000;
  int k_features = 10;
  double ridge_lambda = 1.0;
  std::uint64_t seed = 0;
  // Measure distances (and apply the ridge penalty) in z-scored units.
  bool standardize = true;

  void validate() const;
  double resolved_kernel_width(Eigen::Index n_features) const {
    return kernel_width > 0.0 ? kernel_width : 0.75 * std::sqrt(static_cast<double>(n_features));
  }
};

// Thrown when too few samples carry non-negligible kernel weight.
class KernelTooNarrow : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Per-feature training mean and population standard deviation.
struct FeatureStats {
  Eigen::VectorXd mean;
  Eigen::VectorXd stddev;
  std::vector<std::string> names;

  static FeatureStats from_matrix(const Eigen::MatrixXd& x, std::vector<std::string> names);

  Eigen::Index size() const { return mean.size(); }
  bool is_constant(Eigen::Index j) const { return !(stddev(j) > 0.0); }
  // Divisor used for z-scoring (1 for constant features).
  Eigen::VectorXd scale() const;
};

struct FeatureWeight {
  Eigen::Index feature = 0;
  std::string name;
  double weight = 0.0;
};

struct Explanation {
  std::int64_t instance_id = 0;
  std::string label;
  double intercept = 0.0;
  // Selected features ordered by |weight| * std, descending.
  std::vector<FeatureWeight> features;
  // Weighted R^2 of the surrogate on the samples; NaN when the black box is
  // constant over the neighbourhood.
  double local_fit = kMissing;
  double model_prediction = 0.0;
  double local_prediction = 0.0;
  // Observed target of the explained row, NaN when unknown.
  double target = kMissing;
  LimeConfig config;

  bool local_fit_defined() const { return !std::isnan(local_fit); }
  // Dense row of the weight matrix (zeros on unselected features).
  Eigen::VectorXd dense_weights(Eigen::Index n_features) const;
};

// Row 0 is `x`; the remaining rows are drawn feature-wise from
// N(mean_j, std_j). Constant features stay at x_j.
Eigen::MatrixXd sample_neighborhood(const Eigen::Ref<const Eigen::VectorXd>& x,
                                    const FeatureStats& stats, int n, std::uint64_t seed);

// exp(-d^2 / width^2) for the Euclidean distance d between x and z, in units
// of `scale` per feature.
template <typename DerivedX, typename DerivedZ, typename DerivedS>
typename DerivedX::Scalar kernel_weight(const Eigen::MatrixBase<DerivedX>& x,
                                        const Eigen::MatrixBase<DerivedZ>& z,
                                        typename DerivedX::Scalar width,
                                        const Eigen::MatrixBase<DerivedS>& scale) {
  if (!(width > 0)) throw std::invalid_argument("kernel_weight: width must be positive");
  const auto d2 = ((x - z).array() / scale.array()).square().sum();
  return std::exp(-d2 / (width * width));
}

// Kernel weight of every sample row relative to row `x`.
Eigen::VectorXd kernel_weights(const Eigen::Ref<const Eigen::VectorXd>& x,
                               const Eigen::MatrixXd& samples, double width,
                               const Eigen::VectorXd& scale);

Explanation fit_local_model(const Eigen::MatrixXd& samples, const Eigen::VectorXd& weights,
                            const Eigen::VectorXd& black_box_predictions,
                            const FeatureStats& stats, const LimeConfig& config);

Explanation explain(const Predictor& model, const Eigen::Ref<const Eigen::VectorXd>& x,
                    const FeatureStats& stats, const LimeConfig& config,
                    std::int64_t instance_id = 0);

}  // namespace panellime

#endif  // PANELLIME_LIME_H_
