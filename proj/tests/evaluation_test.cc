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
#include <numeric>
#include <vector>

#include <boost/math/distributions/students_t.hpp>
#include <boost/math/special_functions/beta.hpp>
#include <gtest/gtest.h>

namespace panellime {
namespace {

Predictor linear_model(const Eigen::VectorXd& coefficients) {
  Predictor::State s;
  s.family = ModelFamily::linear;
  s.coefficients = coefficients;
  for (Eigen::Index j = 0; j < coefficients.size(); ++j) s.feature_names.push_back("x" + std::to_string(j + 1));
  return Predictor(std::move(s));
}

TEST(RSquared, Examples) {
  EXPECT_DOUBLE_EQ(r_squared(Eigen::Vector3d(1, 2, 3), Eigen::Vector3d(1, 2, 4)), 0.5);
  EXPECT_EQ(r_squared(Eigen::Vector3d(1, 2, 3), Eigen::Vector3d(1, 2, 3)), 1.0);
  EXPECT_NEAR(r_squared(Eigen::Vector3d(1, 2, 3), Eigen::Vector3d(2, 2, 2)), 0.0, 1e-15);
  EXPECT_THROW(r_squared(Eigen::Vector3d(1, 1, 1), Eigen::Vector3d(1, 2, 3)), NumericalError);
  EXPECT_THROW(r_squared(Eigen::VectorXd::Constant(1, 1.0), Eigen::VectorXd::Constant(1, 1.0)),
               std::invalid_argument);
}

TEST(RSquared, PermutationInvariant) {
  Rng rng(1);
  Eigen::VectorXd y(30), p(30);
  for (int i = 0; i < 30; ++i) {
    y(i) = rng.normal();
    p(i) = y(i) + 0.3 * rng.normal();
  }
  std::vector<int> order(30);
  std::iota(order.begin(), order.end(), 0);
  rng.shuffle(order);
  Eigen::VectorXd ys(30), ps(30);
  for (int i = 0; i < 30; ++i) {
    ys(i) = y(order[i]);
    ps(i) = p(order[i]);
  }
  EXPECT_NEAR(r_squared(y, p), r_squared(ys, ps), 1e-12);
}

TEST(Mask, Example) {
  const Eigen::RowVector3d row(1, 2, 3);
  const std::vector<Eigen::Index> keep{0, 2};
  EXPECT_EQ(mask_to_columns(row, std::span<const Eigen::Index>(keep)), Eigen::RowVector3d(1, 0, 3));
}

TEST(Mask, IdempotentAndValidated) {
  Rng rng(2);
  Eigen::MatrixXd rows(4, 5);
  for (Eigen::Index i = 0; i < rows.size(); ++i) rows.data()[i] = rng.normal();
  const std::vector<Eigen::Index> keep{1, 3};
  const Eigen::MatrixXd once = mask_to_columns(rows, std::span<const Eigen::Index>(keep));
  EXPECT_EQ(mask_to_columns(once, std::span<const Eigen::Index>(keep)), once);
  EXPECT_EQ(once.col(1), rows.col(1));
  EXPECT_TRUE(once.col(0).isZero(0.0));
  const std::vector<Eigen::Index> none, bad{5};
  EXPECT_THROW(mask_to_columns(rows, std::span<const Eigen::Index>(none)), std::invalid_argument);
  EXPECT_THROW(mask_to_columns(rows, std::span<const Eigen::Index>(bad)), std::out_of_range);
}

TEST(IncompleteBeta, MatchesBoost) {
  for (const double a : {0.5, 1.0, 2.5, 10.0, 40.0}) {
    for (const double b : {0.5, 1.0, 3.0, 12.0}) {
      for (const double x : {0.0, 0.01, 0.2, 0.5, 0.77, 0.99, 1.0}) {
        EXPECT_NEAR(regularized_incomplete_beta(a, b, x), boost::math::ibeta(a, b, x), 1e-12)
            << a << " " << b << " " << x;
      }
    }
  }
}

TEST(StudentT, CdfMatchesBoost) {
  for (const double df : {1.0, 2.0, 4.0, 9.0, 30.0}) {
    const boost::math::students_t dist(df);
    for (const double t : {-6.0, -2.0, -0.3, 0.0, 0.7, 2.5, 8.0}) {
      EXPECT_NEAR(student_t_cdf(t, df), boost::math::cdf(dist, t), 1e-12);
    }
  }
}

TEST(PairedTTest, ClosedForm) {
  // Differences 1, 2, 3: mean 2, sd 1, t = 2 * sqrt(3), df 2.
  const std::vector<double> a{1, 2, 3}, b{0, 0, 0};
  const TTestResult r = paired_t_test(a, b);
  EXPECT_NEAR(r.t, 2.0 * std::sqrt(3.0), 1e-12);
  EXPECT_EQ(r.df, 2);
  // Upper tail of t with 2 df: 1/2 - t / (2 sqrt(t^2 + 2)).
  const double expected = 0.5 - r.t / (2.0 * std::sqrt(r.t * r.t + 2.0));
  EXPECT_NEAR(r.p, expected, 1e-12);
  EXPECT_NEAR(r.p, 0.0371, 1e-4);
  EXPECT_NEAR(r.p, boost::math::cdf(boost::math::complement(boost::math::students_t(2.0), r.t)), 1e-12);
}

TEST(PairedTTest, SymmetryAndDegenerateCases) {
  const std::vector<double> a{0.9, 0.7, 0.85, 0.6}, b{0.5, 0.75, 0.4, 0.55};
  const TTestResult ab = paired_t_test(a, b), ba = paired_t_test(b, a);
  EXPECT_NEAR(ab.p + ba.p, 1.0, 1e-12);
  EXPECT_NEAR(ab.t, -ba.t, 1e-12);

  const TTestResult same = paired_t_test(a, a);
  EXPECT_EQ(same.p, 0.5);
  EXPECT_EQ(same.t, 0.0);
  const std::vector<double> exact{0.5, 0.25, 0.75, 1.5}, shifted{1.5, 1.25, 1.75, 2.5};
  EXPECT_EQ(paired_t_test(shifted, exact).p, 0.0);
  EXPECT_EQ(paired_t_test(exact, shifted).p, 1.0);
  const std::vector<double> one{1.0}, two{1.0, 2.0};
  EXPECT_THROW(paired_t_test(one, one), std::invalid_argument);
  EXPECT_THROW(paired_t_test(two, one), std::invalid_argument);
}

TEST(ExperimentConfig, Validation) {
  ExperimentConfig c;
  EXPECT_NO_THROW(c.validate());
  c.k = 0;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c.k = 2;
  c.n_runs = 1;
  EXPECT_THROW(c.validate(), std::invalid_argument);
}

struct Synthetic {
  Eigen::MatrixXd x;
  Eigen::VectorXd y;
  Predictor model;
  FeatureStats stats;
};

Synthetic synthetic(Eigen::Index n) {
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(8);
  beta << 5, -4, 3, 0, 0, 0, 0.1, 0;
  Synthetic s{Eigen::MatrixXd(n, 8), Eigen::VectorXd(n), linear_model(beta), {}};
  Rng rng(3);
  for (Eigen::Index i = 0; i < s.x.size(); ++i) s.x.data()[i] = rng.normal();
  s.y = s.x * beta;
  s.stats = FeatureStats::from_matrix(s.x, s.model.feature_names());
  return s;
}

TEST(Experiment, NoMaskingWhenKCoversAllFeatures) {
  const Synthetic s = synthetic(40);
  LimeConfig lime;
  lime.n_samples = 200;
  ExperimentConfig c;
  c.k = 8;
  c.n_runs = 3;
  const EvalReport r = lime_vs_random_experiment(s.model, s.x, s.y, s.stats, lime, c);
  ASSERT_EQ(r.runs.size(), 3u);
  for (const auto& run : r.runs) {
    EXPECT_EQ(run.r2_lime, r.r2_full_model);
    EXPECT_EQ(run.r2_random, r.r2_full_model);
  }
  EXPECT_EQ(r.p_value, 0.5);
}

TEST(Experiment, LimeColumnsBeatRandomColumns) {
  const Synthetic s = synthetic(60);
  LimeConfig lime;
  lime.n_samples = 500;
  ExperimentConfig c;
  c.k = 3;
  c.n_runs = 5;
  c.seed = 11;
  const EvalReport r = lime_vs_random_experiment(s.model, s.x, s.y, s.stats, lime, c);
  EXPECT_NEAR(r.r2_full_model, 1.0, 1e-12);
  EXPECT_EQ(r.failed_explanations, 0);
  EXPECT_GT(r.mean_r2_lime(), 0.95);
  EXPECT_GT(r.mean_r2_lime() - r.mean_r2_random(), 0.2);
  EXPECT_LT(r.p_value, 0.05);
  for (const auto& run : r.runs) {
    EXPECT_EQ(run.random_columns.size(), 3u);
    EXPECT_TRUE(std::is_sorted(run.random_columns.begin(), run.random_columns.end()));
  }
  const EvalReport again = lime_vs_random_experiment(s.model, s.x, s.y, s.stats, lime, c);
  for (std::size_t i = 0; i < r.runs.size(); ++i) EXPECT_EQ(r.runs[i].r2_lime, again.runs[i].r2_lime);
}

TEST(Experiment, MaxInstancesAndErrors) {
  const Synthetic s = synthetic(30);
  LimeConfig lime;
  lime.n_samples = 100;
  ExperimentConfig c;
  c.max_instances = 10;
  const EvalReport r = lime_vs_random_experiment(s.model, s.x, s.y, s.stats, lime, c);
  EXPECT_EQ(r.n_instances, 10);
  c.max_instances = 1;
  EXPECT_THROW(lime_vs_random_experiment(s.model, s.x, s.y, s.stats, lime, c), std::invalid_argument);
  c.max_instances = 0;
  EXPECT_THROW(lime_vs_random_experiment(s.model, s.x.leftCols(4), s.y, s.stats, lime, c), std::invalid_argument);
}

}  // namespace
}  // namespace panellime
