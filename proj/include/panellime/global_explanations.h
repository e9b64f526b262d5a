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

// Global summaries built from many local explanations: submodular pick,
// selection frequencies and ICE/PDP curves with a slope ranking.

#ifndef PANELLIME_GLOBAL_EXPLANATIONS_H_
#define PANELLIME_GLOBAL_EXPLANATIONS_H_

#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "panellime/lime.h"
#include "panellime/models.h"

namespace panellime {

// Row i is the dense weight vector of explanation i.
struct WeightMatrix {
  Eigen::MatrixXd weights;
  std::vector<std::int64_t> instance_ids;
  std::vector<std::string> feature_names;

  static WeightMatrix from_explanations(std::span<const Explanation> explanations,
                                        std::vector<std::string> feature_names);
  Eigen::Index rows() const { return weights.rows(); }
  Eigen::Index cols() const { return weights.cols(); }
};

// I_j = sqrt(sum_i |W_ij|).
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> global_importance(
    const Eigen::MatrixBase<Derived>& w) {
  if (w.rows() == 0 || w.cols() == 0) throw std::invalid_argument("global_importance: empty weight matrix");
  return w.cwiseAbs().colwise().sum().cwiseSqrt().transpose();
}

// Which weights count as touching a feature: any nonzero weight (absolute) or
// strictly positive weights only (positive).
enum class CoverageMode { absolute, positive };

const char* to_string(CoverageMode mode);
CoverageMode parse_coverage_mode(std::string_view name);

template <typename Scalar>
bool touches(Scalar w, CoverageMode mode) {
  return mode == CoverageMode::absolute ? std::abs(w) > Scalar(0) : w > Scalar(0);
}

// c(V, W, I) = sum_j 1[exists i in V: W_ij touches] * I_j. V holds row
// indices of W; an index out of range throws std::out_of_range.
template <typename DerivedW, typename DerivedI>
typename DerivedW::Scalar coverage(std::span<const Eigen::Index> v, const Eigen::MatrixBase<DerivedW>& w,
                                   const Eigen::MatrixBase<DerivedI>& importance,
                                   CoverageMode mode = CoverageMode::absolute) {
  using Scalar = typename DerivedW::Scalar;
  if (importance.size() != w.cols()) throw std::invalid_argument("coverage: importance width mismatch");
  for (const Eigen::Index i : v) {
    if (i < 0 || i >= w.rows()) throw std::out_of_range("coverage: unknown instance " + std::to_string(i));
  }
  Scalar total(0);
  for (Eigen::Index j = 0; j < w.cols(); ++j) {
    for (const Eigen::Index i : v) {
      if (touches(w(i, j), mode)) {
        total += importance(j);
        break;
      }
    }
  }
  return total;
}

struct PickSelection {
  // Row indices into the weight matrix, in pick order.
  std::vector<Eigen::Index> rows;
  std::vector<std::int64_t> instance_ids;
  int budget = 0;
  double coverage = 0.0;
  CoverageMode mode = CoverageMode::absolute;
};

// Greedy maximization of coverage under |V| <= budget. Each step adds the row
// with the largest marginal gain (lowest index on ties) and stops early once
// no row adds coverage.
PickSelection greedy_pick(const Eigen::MatrixXd& w, const Eigen::VectorXd& importance, int budget,
                          CoverageMode mode = CoverageMode::absolute);
PickSelection greedy_pick(const WeightMatrix& w, int budget, CoverageMode mode = CoverageMode::absolute);

struct FeatureFrequency {
  Eigen::Index feature = 0;
  std::string name;
  int count = 0;
  // Sum of |weight| over the appearances; breaks ties in the ordering.
  double total_abs_weight = 0.0;
};

// How often each feature appears among the top_k features (by |weight|) of
// the given explanations, most frequent first. Features that never appear are
// omitted.
std::vector<FeatureFrequency> selection_frequency(std::span<const Explanation> explanations, int top_k);

struct IceCurve {
  Eigen::Index feature = 0;
  std::string name;
  Eigen::VectorXd grid;
  // One row per instance, one column per grid point.
  Eigen::MatrixXd predictions;
  Eigen::VectorXd pdp;
  // (max - min) / (grid span) per instance.
  Eigen::VectorXd slope_scores;
  double slope_score = 0.0;
};

// Predictions of `model` as `feature` sweeps `grid` with the other features of
// each instance held fixed.
IceCurve ice_curves(const Predictor& model, const Eigen::MatrixXd& instances, Eigen::Index feature,
                    const Eigen::VectorXd& grid);

// `n_points` equally spaced values between the lower and upper percentiles of
// `values` (linear interpolation between order statistics).
Eigen::VectorXd default_grid(const Eigen::Ref<const Eigen::VectorXd>& values, int n_points = 20,
                             double lower_percentile = 1.0, double upper_percentile = 99.0);

// Linear-interpolated percentile, p in [0, 100].
double percentile(const Eigen::Ref<const Eigen::VectorXd>& values, double p);

struct SlopeScore {
  Eigen::Index feature = 0;
  std::string name;
  double score = 0.0;
};

// Features by aggregate slope score, descending (lower feature id on ties).
std::vector<SlopeScore> slope_rank(std::span<const IceCurve> curves);

}  // namespace panellime

#endif  // PANELLIME_GLOBAL_EXPLANATIONS_H_
