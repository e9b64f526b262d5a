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

// Regression scores shared by model search and the evaluation harness.

#ifndef PANELLIME_METRICS_H_
#define PANELLIME_METRICS_H_

#include <stdexcept>

#include <Eigen/Dense>

#include "panellime/common.h"

namespace panellime {

// Coefficient of determination, 1 - SS_res / SS_tot.
template <typename DerivedY, typename DerivedP>
typename DerivedY::Scalar r_squared(const Eigen::MatrixBase<DerivedY>& y,
                                    const Eigen::MatrixBase<DerivedP>& yhat) {
  using Scalar = typename DerivedY::Scalar;
  if (y.size() != yhat.size()) throw std::invalid_argument("r_squared: size mismatch");
  if (y.size() < 2) throw std::invalid_argument("r_squared: at least two observations required");
  const Scalar mean = y.mean();
  const Scalar ss_tot = (y.array() - mean).square().sum();
  if (!(ss_tot > 0)) throw NumericalError("r_squared: observed values have zero variance");
  const Scalar ss_res = (y - yhat).squaredNorm();
  return Scalar(1) - ss_res / ss_tot;
}

template <typename DerivedY, typename DerivedP>
typename DerivedY::Scalar mean_squared_error(const Eigen::MatrixBase<DerivedY>& y,
                                             const Eigen::MatrixBase<DerivedP>& yhat) {
  if (y.size() != yhat.size() || y.size() == 0) {
    throw std::invalid_argument("mean_squared_error: size mismatch");
  }
  return (y - yhat).squaredNorm() / static_cast<typename DerivedY::Scalar>(y.size());
}

}  // namespace panellime

#endif  // PANELLIME_METRICS_H_
