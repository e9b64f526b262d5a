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

#include "panellime/evaluation.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace panellime {
namespace {

// Lentz evaluation of the continued fraction for I_x(a, b).
double beta_continued_fraction(double a, double b, double x) {
  constexpr double kTiny = 1e-300;
  constexpr double kEps = 1e-16;
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= 10000; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < kEps) return h;
  }
  throw NumericalError("incomplete beta: continued fraction did not converge");
}

// Upper tail P(T > t).
double student_t_upper(double t, double df) {
  const double x = df / (df + t * t);
  const double half = 0.5 * regularized_incomplete_beta(0.5 * df, 0.5, x);
  return t > 0.0 ? half : 1.0 - half;
}

}  // namespace

double regularized_incomplete_beta(double a, double b, double x) {
  if (!(a > 0.0 && b > 0.0)) throw std::invalid_argument("incomplete beta: a and b must be positive");
  if (!(x >= 0.0 && x <= 1.0)) throw std::invalid_argument("incomplete beta: x outside [0, 1]");
  if (x == 0.0 || x == 1.0) return x;
  const double log_front =
      std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log1p(-x);
  const double front = std::exp(log_front);
  if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_continued_fraction(a, b, x) / a;
  return 1.0 - front * beta_continued_fraction(b, a, 1.0 - x) / b;
}

double student_t_cdf(double t, double df) {
  if (!(df > 0.0)) throw std::invalid_argument("student_t_cdf: df must be positive");
  if (std::isnan(t)) return t;
  if (std::isinf(t)) return t > 0.0 ? 1.0 : 0.0;
  return 1.0 - student_t_upper(t, df);
}

TTestResult paired_t_test(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("paired_t_test: samples differ in length");
  if (a.size() < 2) throw std::invalid_argument("paired_t_test: at least two pairs required");
  const auto n = static_cast<Eigen::Index>(a.size());
  const Eigen::VectorXd d = Eigen::Map<const Eigen::VectorXd>(a.data(), n) - Eigen::Map<const Eigen::VectorXd>(b.data(), n);
  const double mean = d.mean();
  const double sd = std::sqrt((d.array() - mean).square().sum() / static_cast<double>(n - 1));
  TTestResult r;
  r.df = static_cast<int>(n - 1);
  if (!(sd > 0.0)) {
    if (mean > 0.0) {
      r.t = std::numeric_limits<double>::infinity();
      r.p = 0.0;
    } else if (mean < 0.0) {
      r.t = -std::numeric_limits<double>::infinity();
      r.p = 1.0;
    } else {
      r.t = 0.0;
      r.p = 0.5;
    }
    return r;
  }
  r.t = mean / (sd / std::sqrt(static_cast<double>(n)));
  r.p = student_t_upper(r.t, r.df);
  return r;
}

void ExperimentConfig::validate() const {
  if (k < 1) throw std::invalid_argument("experiment: k must be at least 1");
  if (n_runs < 2) throw std::invalid_argument("experiment: at least two runs are needed for the paired test");
  if (max_instances < 0) throw std::invalid_argument("experiment: max_instances must be nonnegative");
}

double EvalReport::mean_r2_lime() const {
  double s = 0.0;
  for (const auto& r : runs) s += r.r2_lime;
  return runs.empty() ? 0.0 : s / static_cast<double>(runs.size());
}

double EvalReport::mean_r2_random() const {
  double s = 0.0;
  for (const auto& r : runs) s += r.r2_random;
  return runs.empty() ? 0.0 : s / static_cast<double>(runs.size());
}

EvalReport lime_vs_random_experiment(const Predictor& model, const Eigen::MatrixXd& x,
                                     const Eigen::VectorXd& y, const FeatureStats& stats,
                                     const LimeConfig& lime_config, const ExperimentConfig& config) {
  config.validate();
  if (x.rows() != y.size()) throw std::invalid_argument("experiment: feature rows and targets differ");
  if (x.cols() != model.n_features()) throw std::invalid_argument("experiment: width does not match the model");
  Eigen::Index n = x.rows();
  if (config.max_instances > 0) n = std::min<Eigen::Index>(n, config.max_instances);
  if (n < 2) throw std::invalid_argument("experiment: at least two test rows required");

  const Eigen::MatrixXd rows = x.topRows(n);
  const Eigen::VectorXd target = y.head(n);
  const Eigen::Index n_features = x.cols();

  EvalReport report;
  report.k_columns = config.k;
  report.n_instances = static_cast<int>(n);
  report.seed = config.seed;
  report.feature_names = model.feature_names();
  report.r2_full_model = r_squared(target, model.predict(rows));

  LimeConfig lime = lime_config;
  lime.k_features = config.k;

  std::vector<Eigen::Index> all(static_cast<std::size_t>(n_features));
  std::iota(all.begin(), all.end(), Eigen::Index{0});

  for (int run = 0; run < config.n_runs; ++run) {
    EvalRun result;
    const auto r = static_cast<std::uint64_t>(run);
    if (config.k >= n_features) {
      result.random_columns = all;
      result.r2_lime = report.r2_full_model;
      result.r2_random = report.r2_full_model;
      report.runs.push_back(result);
      continue;
    }

    Rng column_rng(derive_seed(config.seed, 2 * r + 1));
    std::vector<Eigen::Index> shuffled = all;
    column_rng.shuffle(shuffled);
    result.random_columns.assign(shuffled.begin(), shuffled.begin() + config.k);
    std::sort(result.random_columns.begin(), result.random_columns.end());

    const std::uint64_t lime_seed = derive_seed(config.seed, 2 * r);
    std::vector<Eigen::Index> evaluated;
    Eigen::MatrixXd lime_masked(n, n_features);
    for (Eigen::Index i = 0; i < n; ++i) {
      lime.seed = derive_seed(lime_seed, static_cast<std::uint64_t>(i));
      try {
        const Explanation e = explain(model, rows.row(i).transpose(), stats, lime, i);
        std::vector<Eigen::Index> keep;
        for (const auto& f : e.features) keep.push_back(f.feature);
        const auto row = static_cast<Eigen::Index>(evaluated.size());
        if (keep.empty()) {
          lime_masked.row(row).setZero();
        } else {
          lime_masked.row(row) = mask_to_columns(rows.row(i), std::span<const Eigen::Index>(keep));
        }
        evaluated.push_back(i);
      } catch (const std::exception& ex) {
        ++report.failed_explanations;
        log_warning("experiment: explanation of row " + std::to_string(i) + " failed: " + ex.what());
      }
    }
    const auto m = static_cast<Eigen::Index>(evaluated.size());
    if (m < 2) throw NumericalError("experiment: fewer than two explanations succeeded");
    Eigen::VectorXd observed(m);
    Eigen::MatrixXd kept_rows(m, n_features);
    for (Eigen::Index j = 0; j < m; ++j) {
      observed(j) = target(evaluated[static_cast<std::size_t>(j)]);
      kept_rows.row(j) = rows.row(evaluated[static_cast<std::size_t>(j)]);
    }
    result.r2_lime = r_squared(observed, model.predict(lime_masked.topRows(m)));
    const Eigen::MatrixXd random_masked =
        mask_to_columns(kept_rows, std::span<const Eigen::Index>(result.random_columns));
    result.r2_random = r_squared(observed, model.predict(random_masked));
    report.runs.push_back(std::move(result));
  }

  std::vector<double> a;
  std::vector<double> b;
  for (const auto& run : report.runs) {
    a.push_back(run.r2_lime);
    b.push_back(run.r2_random);
  }
  const TTestResult test = paired_t_test(a, b);
  report.t_statistic = test.t;
  report.p_value = test.p;
  report.df = test.df;
  return report;
}

EvalReport lime_vs_random_experiment(const Predictor& model, const DataTable& test,
                                     const FeatureStats& stats, const LimeConfig& lime_config,
                                     const ExperimentConfig& config) {
  return lime_vs_random_experiment(model, test.feature_matrix(), test.target_vector(), stats, lime_config,
                                   config);
}

}  // namespace panellime
