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

// Weighted (penalized) least squares with an unpenalized intercept.

#ifndef PANELLIME_LINEAR_SOLVE_H_
#define PANELLIME_LINEAR_SOLVE_H_

#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>

namespace panellime {

template <typename Scalar>
struct LinearFit {
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  Scalar intercept = 0;
  Vector coefficients;
  // Numerical rank of the centered (and, with a penalty, augmented) design.
  Eigen::Index rank = 0;

  bool rank_deficient() const { return rank < coefficients.size(); }

  template <typename Derived>
  Vector predict(const Eigen::MatrixBase<Derived>& x) const {
    return ((x * coefficients).array() + intercept).matrix();
  }
};

// Minimizes
//   sum_i w_i (y_i - b0 - x_i . b)^2 + lambda * sum_j (s_j b_j)^2
// where s is `penalty_scale` (all ones when empty). Weights must be
// nonnegative with a positive sum.
//
// The problem is centered on the weighted means, which removes the intercept,
// and solved as a stacked least-squares system with a complete orthogonal
// decomposition. With lambda = 0 and a rank-deficient design this returns the
// minimum-norm solution, the lambda -> 0 limit of ridge regression.
template <typename DerivedX, typename DerivedY, typename DerivedW, typename DerivedS>
LinearFit<typename DerivedX::Scalar> weighted_ridge(
    const Eigen::MatrixBase<DerivedX>& x, const Eigen::MatrixBase<DerivedY>& y,
    const Eigen::MatrixBase<DerivedW>& w, typename DerivedX::Scalar lambda,
    const Eigen::MatrixBase<DerivedS>& penalty_scale) {
  using Scalar = typename DerivedX::Scalar;
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  const Eigen::Index n = x.rows();
  const Eigen::Index p = x.cols();
  if (y.size() != n || w.size() != n) {
    throw std::invalid_argument("weighted_ridge: row counts differ");
  }
  if (penalty_scale.size() != 0 && penalty_scale.size() != p) {
    throw std::invalid_argument("weighted_ridge: penalty scale has wrong length");
  }
  if (lambda < 0) throw std::invalid_argument("weighted_ridge: negative penalty");
  if ((w.array() < 0).any()) throw std::invalid_argument("weighted_ridge: negative weight");
  const Scalar total = w.sum();
  if (!(total > 0)) throw std::invalid_argument("weighted_ridge: weights sum to zero");

  const Vector x_mean = (x.transpose() * w) / total;
  const Scalar y_mean = w.dot(y) / total;

  LinearFit<Scalar> fit;
  if (p == 0) {
    fit.intercept = y_mean;
    fit.coefficients = Vector::Zero(0);
    return fit;
  }

  const Vector sqrt_w = w.array().sqrt().matrix();
  const bool penalized = lambda > 0;
  const Eigen::Index rows = penalized ? n + p : n;
  Matrix design(rows, p);
  Vector rhs(rows);
  design.topRows(n) = sqrt_w.asDiagonal() * (x.rowwise() - x_mean.transpose());
  rhs.head(n) = sqrt_w.cwiseProduct((y.array() - y_mean).matrix());
  if (penalized) {
    const Vector s = penalty_scale.size() == 0 ? Vector::Ones(p) : Vector(penalty_scale);
    design.bottomRows(p) = (std::sqrt(lambda) * s).asDiagonal();
    rhs.tail(p).setZero();
  }

  Eigen::CompleteOrthogonalDecomposition<Matrix> cod(design);
  fit.coefficients = cod.solve(rhs);
  fit.rank = cod.rank();
  fit.intercept = y_mean - x_mean.dot(fit.coefficients);
  return fit;
}

template <typename DerivedX, typename DerivedY, typename DerivedW>
LinearFit<typename DerivedX::Scalar> weighted_ridge(const Eigen::MatrixBase<DerivedX>& x,
                                                    const Eigen::MatrixBase<DerivedY>& y,
                                                    const Eigen::MatrixBase<DerivedW>& w,
                                                    typename DerivedX::Scalar lambda) {
  using Vector = Eigen::Matrix<typename DerivedX::Scalar, Eigen::Dynamic, 1>;
  return weighted_ridge(x, y, w, lambda, Vector(0));
}

// Ordinary least squares with intercept.
template <typename DerivedX, typename DerivedY>
LinearFit<typename DerivedX::Scalar> ordinary_least_squares(const Eigen::MatrixBase<DerivedX>& x,
                                                           const Eigen::MatrixBase<DerivedY>& y) {
  using Vector = Eigen::Matrix<typename DerivedX::Scalar, Eigen::Dynamic, 1>;
  return weighted_ridge(x, y, Vector::Ones(x.rows()), typename DerivedX::Scalar(0));
}

}  // namespace panellime

#endif  // PANELLIME_LINEAR_SOLVE_H_
