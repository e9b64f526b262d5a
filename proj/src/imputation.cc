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

#include "panellime/imputation.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <stdexcept>

#include "panellime/common.h"
#include "panellime/linear_solve.h"

namespace panellime {
namespace {

// Columns that may serve as regressors when filling `column`.
std::vector<Eigen::Index> predictor_columns(const DataTable& table, Eigen::Index column) {
  std::vector<Eigen::Index> cols;
  for (Eigen::Index c = 0; c < table.n_cols(); ++c) {
    if (c == column) continue;
    const ColumnKind k = table.kind(c);
    if (k == ColumnKind::numeric || k == ColumnKind::time || k == ColumnKind::target) {
      cols.push_back(c);
    }
  }
  return cols;
}

std::vector<Eigen::Index> rows_or_all(const DataTable& table, std::span<const Eigen::Index> rows) {
  if (!rows.empty()) return {rows.begin(), rows.end()};
  std::vector<Eigen::Index> all(table.n_rows());
  std::iota(all.begin(), all.end(), Eigen::Index{0});
  return all;
}

std::vector<Eigen::Index> observed_subset(const Eigen::MatrixXd& values, Eigen::Index row,
                                          const std::vector<Eigen::Index>& cols) {
  std::vector<Eigen::Index> out;
  for (const auto c : cols) {
    if (!std::isnan(values(row, c))) out.push_back(c);
  }
  return out;
}

bool all_observed(const Eigen::MatrixXd& values, Eigen::Index row,
                  const std::vector<Eigen::Index>& cols) {
  return std::none_of(cols.begin(), cols.end(),
                      [&](Eigen::Index c) { return std::isnan(values(row, c)); });
}

Eigen::MatrixXd gather(const Eigen::MatrixXd& values, const std::vector<Eigen::Index>& rows,
                       const std::vector<Eigen::Index>& cols) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < cols.size(); ++j) out(i, j) = values(rows[i], cols[j]);
  }
  return out;
}

}  // namespace

const char* to_string(ImputationMethod method) {
  switch (method) {
    case ImputationMethod::linear: return "linear";
    case ImputationMethod::knn: return "knn";
    case ImputationMethod::iterative: return "iterative";
  }
  return "unknown";
}

ImputationMethod parse_imputation_method(std::string_view name) {
  if (name == "linear") return ImputationMethod::linear;
  if (name == "knn") return ImputationMethod::knn;
  if (name == "iterative") return ImputationMethod::iterative;
  throw std::invalid_argument("unknown imputation method: " + std::string(name));
}

void ImputationPolicy::validate() const {
  if (!(theta >= 0.0 && theta <= 1.0)) throw std::invalid_argument("theta must lie in [0, 1]");
  if (k < 1) throw std::invalid_argument("k must be at least 1");
  if (max_iterations < 1) throw std::invalid_argument("max_iterations must be at least 1");
  if (!(tolerance > 0.0)) throw std::invalid_argument("tolerance must be positive");
}

double missing_rate(std::span<const double> row, std::span<const Eigen::Index> columns) {
  if (columns.empty()) throw std::invalid_argument("missing_rate: no imputable columns");
  const auto missing = std::count_if(columns.begin(), columns.end(), [&](Eigen::Index c) {
    return std::isnan(row[static_cast<std::size_t>(c)]);
  });
  return static_cast<double>(missing) / static_cast<double>(columns.size());
}

double missing_rate(const DataTable& table, Eigen::Index row) {
  const Eigen::RowVectorXd r = table.values().row(row);
  const auto cols = imputable_columns(table);
  return missing_rate(std::span<const double>(r.data(), static_cast<std::size_t>(r.size())), cols);
}

std::vector<Eigen::Index> imputable_columns(const DataTable& table) {
  std::vector<Eigen::Index> cols;
  for (Eigen::Index c = 0; c < table.n_cols(); ++c) {
    if (table.kind(c) == ColumnKind::numeric) cols.push_back(c);
  }
  return cols;
}

std::vector<Eigen::Index> qualifying_rows(const DataTable& table, double theta) {
  const auto cols = imputable_columns(table);
  std::vector<Eigen::Index> rows;
  for (Eigen::Index r = 0; r < table.n_rows(); ++r) {
    if (cols.empty() || missing_rate(table, r) <= theta) rows.push_back(r);
  }
  return rows;
}

ColumnImputation impute_linear(const DataTable& table, Eigen::Index column,
                               std::span<const Eigen::Index> rows) {
  const Eigen::MatrixXd& values = table.values();
  const auto predictors = predictor_columns(table, column);
  ColumnImputation out;
  out.values = values.col(column);

  std::map<std::vector<Eigen::Index>, std::optional<LinearFit<double>>> fits;
  for (const auto r : rows_or_all(table, rows)) {
    if (!std::isnan(values(r, column))) continue;
    const auto pattern = observed_subset(values, r, predictors);
    auto it = fits.find(pattern);
    if (it == fits.end()) {
      std::vector<Eigen::Index> train;
      for (Eigen::Index t = 0; t < table.n_rows(); ++t) {
        if (!std::isnan(values(t, column)) && all_observed(values, t, pattern)) train.push_back(t);
      }
      std::optional<LinearFit<double>> fit;
      if (train.size() >= pattern.size() + 1) {
        const Eigen::MatrixXd x = gather(values, train, pattern);
        const Eigen::VectorXd y = gather(values, train, {column});
        fit = ordinary_least_squares(x, y);
        if (fit->rank_deficient()) ++out.rank_deficient_fits;
      }
      it = fits.emplace(pattern, std::move(fit)).first;
    }
    if (!it->second) {
      ++out.cells_unfillable;
      continue;
    }
    const Eigen::MatrixXd x = gather(values, {r}, pattern);
    out.values(r) = it->second->predict(x)(0);
    ++out.cells_filled;
  }
  return out;
}

double inverse_distance_average(std::span<const double> distances, std::span<const double> values) {
  if (distances.size() != values.size() || distances.empty()) {
    throw std::invalid_argument("inverse_distance_average: need matching nonempty inputs");
  }
  double exact_sum = 0.0;
  std::size_t exact_count = 0;
  for (std::size_t i = 0; i < distances.size(); ++i) {
    if (distances[i] == 0.0) {
      exact_sum += values[i];
      ++exact_count;
    }
  }
  if (exact_count > 0) return exact_sum / static_cast<double>(exact_count);
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < distances.size(); ++i) {
    const double w = 1.0 / distances[i];
    num += w * values[i];
    den += w;
  }
  return num / den;
}

KnnImputation impute_knn(const DataTable& table, Eigen::Index column, int k,
                         std::span<const Eigen::Index> rows) {
  if (k < 1) throw std::invalid_argument("impute_knn: k must be at least 1");
  const Eigen::MatrixXd& values = table.values();
  const auto predictors = predictor_columns(table, column);

  // z-score parameters from observed cells.
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(table.n_cols());
  Eigen::VectorXd scale = Eigen::VectorXd::Ones(table.n_cols());
  for (const auto c : predictors) {
    double sum = 0.0, sq = 0.0;
    Eigen::Index n = 0;
    for (Eigen::Index r = 0; r < table.n_rows(); ++r) {
      if (std::isnan(values(r, c))) continue;
      sum += values(r, c);
      ++n;
    }
    if (n == 0) continue;
    mean(c) = sum / static_cast<double>(n);
    for (Eigen::Index r = 0; r < table.n_rows(); ++r) {
      if (!std::isnan(values(r, c))) sq += (values(r, c) - mean(c)) * (values(r, c) - mean(c));
    }
    const double sd = std::sqrt(sq / static_cast<double>(n));
    if (sd > 0.0) scale(c) = sd;
  }

  KnnImputation out;
  out.values = values.col(column);
  for (const auto r : rows_or_all(table, rows)) {
    if (!std::isnan(values(r, column))) continue;
    const auto features = observed_subset(values, r, predictors);
    std::vector<std::pair<double, Eigen::Index>> candidates;
    for (Eigen::Index t = 0; t < table.n_rows(); ++t) {
      if (t == r || std::isnan(values(t, column)) || !all_observed(values, t, features)) continue;
      double d2 = 0.0;
      for (const auto c : features) {
        const double diff = (values(r, c) - values(t, c)) / scale(c);
        d2 += diff * diff;
      }
      candidates.emplace_back(std::sqrt(d2), t);
    }
    if (candidates.empty()) {
      ++out.cells_unfillable;
      continue;
    }
    const auto used = std::min<std::size_t>(static_cast<std::size_t>(k), candidates.size());
    if (used < static_cast<std::size_t>(k)) ++out.shortfalls;
    std::partial_sort(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(used),
                      candidates.end());
    std::vector<double> d(used), v(used);
    for (std::size_t i = 0; i < used; ++i) {
      d[i] = candidates[i].first;
      v[i] = values(candidates[i].second, column);
    }
    out.values(r) = inverse_distance_average(d, v);
    ++out.cells_filled;
  }
  return out;
}

std::pair<DataTable, ImputationReport> impute_iterative(const DataTable& table,
                                                        const ImputationPolicy& policy,
                                                        std::span<const Eigen::Index> rows) {
  policy.validate();
  const Eigen::MatrixXd& original = table.values();
  const std::vector<Eigen::Index> work_rows = rows_or_all(table, rows);
  ImputationReport report;
  report.iterations_used = 0;

  // Missing cells of each imputable column inside the working rows.
  std::vector<Eigen::Index> cols;
  std::map<Eigen::Index, std::vector<Eigen::Index>> missing;
  Eigen::MatrixXd current = original;
  std::set<std::string> unfillable;
  for (const auto c : imputable_columns(table)) {
    std::vector<Eigen::Index> miss;
    double sum = 0.0;
    Eigen::Index observed = 0;
    for (const auto r : work_rows) {
      if (std::isnan(original(r, c))) {
        miss.push_back(r);
      } else {
        sum += original(r, c);
        ++observed;
      }
    }
    if (miss.empty()) continue;
    if (observed < 2) {
      report.cells_unfillable += static_cast<Eigen::Index>(miss.size());
      unfillable.insert(table.name(c));
      continue;
    }
    const double mean = sum / static_cast<double>(observed);
    for (const auto r : miss) current(r, c) = mean;
    cols.push_back(c);
    missing.emplace(c, std::move(miss));
  }
  report.unfillable_columns.assign(unfillable.begin(), unfillable.end());

  if (cols.empty()) {
    report.converged = true;
    return {table.with_values(current), report};
  }

  // Regressors must be complete on the working rows once initialized.
  auto regressors_for = [&](Eigen::Index c) {
    std::vector<Eigen::Index> regressors;
    for (const auto p : predictor_columns(table, c)) {
      const bool cell_missing = std::any_of(work_rows.begin(), work_rows.end(), [&](Eigen::Index r) {
        return std::isnan(current(r, p));
      });
      if (!cell_missing) regressors.push_back(p);
    }
    return regressors;
  };

  Rng rng(policy.seed);
  report.converged = false;
  for (int sweep = 1; sweep <= policy.max_iterations; ++sweep) {
    double max_change = 0.0;
    for (const auto c : cols) {
      const auto regressors = regressors_for(c);
      std::vector<Eigen::Index> train;
      for (const auto r : work_rows) {
        if (!std::isnan(original(r, c))) train.push_back(r);
      }
      const Eigen::MatrixXd x = gather(current, train, regressors);
      const Eigen::VectorXd y = gather(current, train, {c});
      const auto fit = ordinary_least_squares(x, y);
      if (fit.rank_deficient()) ++report.rank_deficient_fits;
      double residual_sd = 0.0;
      if (policy.stochastic_residual) {
        const double rss = (y - fit.predict(x)).squaredNorm();
        const auto dof = std::max<Eigen::Index>(
            static_cast<Eigen::Index>(train.size()) - static_cast<Eigen::Index>(regressors.size()) - 1, 1);
        residual_sd = std::sqrt(rss / static_cast<double>(dof));
      }
      const auto& miss = missing.at(c);
      const Eigen::VectorXd pred = fit.predict(gather(current, miss, regressors));
      for (std::size_t i = 0; i < miss.size(); ++i) {
        double v = pred(static_cast<Eigen::Index>(i));
        if (policy.stochastic_residual) v += rng.normal(0.0, residual_sd);
        max_change = std::max(max_change, std::abs(v - current(miss[i], c)));
        current(miss[i], c) = v;
      }
    }
    report.iterations_used = sweep;
    if (max_change < policy.tolerance) {
      report.converged = true;
      break;
    }
  }
  for (const auto& [c, miss] : missing) report.cells_filled += static_cast<Eigen::Index>(miss.size());
  return {table.with_values(current), report};
}

std::pair<DataTable, ImputationReport> impute_table(const DataTable& table,
                                                    const ImputationPolicy& policy) {
  policy.validate();
  const auto cols = imputable_columns(table);
  const auto rows = qualifying_rows(table, policy.theta);
  ImputationReport report;
  report.rows_imputed = static_cast<Eigen::Index>(rows.size());
  report.rows_skipped = table.n_rows() - report.rows_imputed;

  const bool any_missing = std::any_of(rows.begin(), rows.end(), [&](Eigen::Index r) {
    return std::any_of(cols.begin(), cols.end(), [&](Eigen::Index c) { return table.is_missing(r, c); });
  });
  if (cols.empty() || rows.empty() || !any_missing) {
    report.iterations_used = 0;
    return {table, report};
  }

  if (policy.method == ImputationMethod::iterative) {
    auto [filled, iter_report] = impute_iterative(table, policy, rows);
    iter_report.rows_imputed = report.rows_imputed;
    iter_report.rows_skipped = report.rows_skipped;
    return {std::move(filled), iter_report};
  }

  Eigen::MatrixXd values = table.values();
  std::set<std::string> unfillable;
  for (const auto c : cols) {
    Eigen::VectorXd column;
    Eigen::Index unfilled = 0;
    if (policy.method == ImputationMethod::linear) {
      auto result = impute_linear(table, c, rows);
      report.cells_filled += result.cells_filled;
      report.rank_deficient_fits += result.rank_deficient_fits;
      unfilled = result.cells_unfillable;
      column = std::move(result.values);
    } else {
      auto result = impute_knn(table, c, policy.k, rows);
      report.cells_filled += result.cells_filled;
      report.knn_shortfalls += result.shortfalls;
      unfilled = result.cells_unfillable;
      column = std::move(result.values);
    }
    report.cells_unfillable += unfilled;
    if (unfilled > 0) unfillable.insert(table.name(c));
    for (const auto r : rows) {
      if (table.is_missing(r, c)) values(r, c) = column(r);
    }
  }
  report.unfillable_columns.assign(unfillable.begin(), unfillable.end());
  if (!report.unfillable_columns.empty()) {
    log_warning("imputation: " + std::to_string(report.cells_unfillable) +
                " cells could not be filled");
  }
  return {table.with_values(std::move(values)), report};
}

}  // namespace panellime
