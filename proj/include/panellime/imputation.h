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

// Missing-value imputation gated per row by a missing-rate threshold.
//
// A row qualifies for imputation when the fraction of its imputable cells
// that are missing is at most `theta`; rows above the threshold pass through
// untouched. Imputable columns are the numeric columns, i.e. everything but
// the entity, time, target and categorical columns. Observed cells are never
// modified.

#ifndef PANELLIME_IMPUTATION_H_
#define PANELLIME_IMPUTATION_H_

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "panellime/data_table.h"

namespace panellime {

enum class ImputationMethod { linear, knn, iterative };

const char* to_string(ImputationMethod method);
ImputationMethod parse_imputation_method(std::string_view name);

struct ImputationPolicy {
  ImputationMethod method = ImputationMethod::linear;
  double theta = 0.25;
  int k = 5;
  int max_iterations = 10;
  double tolerance = 1e-3;
  // Adds a Gaussian residual draw to each iterative prediction.
  bool stochastic_residual = false;
  std::uint64_t seed = 0;

  // Throws std::invalid_argument when a field is out of range.
  void validate() const;
};

struct ImputationReport {
  Eigen::Index rows_imputed = 0;
  Eigen::Index rows_skipped = 0;
  Eigen::Index cells_filled = 0;
  // Missing cells in qualifying rows that no model could fill.
  Eigen::Index cells_unfillable = 0;
  std::vector<std::string> unfillable_columns;
  // Linear fits whose design was rank deficient (solved as minimum norm).
  Eigen::Index rank_deficient_fits = 0;
  // KNN imputations that used fewer than k neighbours.
  Eigen::Index knn_shortfalls = 0;
  int iterations_used = 0;
  bool converged = true;
};

// Fraction of `columns` that are missing in `row`.
double missing_rate(std::span<const double> row, std::span<const Eigen::Index> columns);
double missing_rate(const DataTable& table, Eigen::Index row);

std::vector<Eigen::Index> imputable_columns(const DataTable& table);

// Rows whose missing rate is at most theta, ascending.
std::vector<Eigen::Index> qualifying_rows(const DataTable& table, double theta);

struct ColumnImputation {
  Eigen::VectorXd values;
  Eigen::Index cells_filled = 0;
  Eigen::Index cells_unfillable = 0;
  Eigen::Index rank_deficient_fits = 0;
};

// Fills the missing cells of `column` in `rows` (all rows when empty) with the
// ordinary least squares prediction from the other numeric, time and target
// columns observed in that row. Models are fit on observed cells only, one
// per distinct predictor set.
ColumnImputation impute_linear(const DataTable& table, Eigen::Index column,
                               std::span<const Eigen::Index> rows = {});

// Inverse-distance weighted average of the k nearest rows observed in the
// column. Distances use z-scored columns observed in the row being filled; a
// neighbour at distance zero is copied.
struct KnnImputation {
  Eigen::VectorXd values;
  Eigen::Index cells_filled = 0;
  Eigen::Index cells_unfillable = 0;
  Eigen::Index shortfalls = 0;
};
KnnImputation impute_knn(const DataTable& table, Eigen::Index column, int k,
                         std::span<const Eigen::Index> rows = {});

// sum(w_i v_i) / sum(w_i) with w_i = 1 / d_i; zero distances dominate.
double inverse_distance_average(std::span<const double> distances, std::span<const double> values);

// Mean initialization followed by left-to-right sweeps of per-column OLS
// refits over the rows in `rows` (all rows when empty), until the largest
// cell change in a sweep drops below the tolerance.
std::pair<DataTable, ImputationReport> impute_iterative(const DataTable& table,
                                                        const ImputationPolicy& policy,
                                                        std::span<const Eigen::Index> rows = {});

std::pair<DataTable, ImputationReport> impute_table(const DataTable& table,
                                                    const ImputationPolicy& policy);

}  // namespace panellime

#endif  // PANELLIME_IMPUTATION_H_
