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

#include <cmath>

#include <gtest/gtest.h>

namespace panellime {
namespace {

FeatureStats unit_stats(Eigen::Index d) {
  FeatureStats s;
  s.mean = Eigen::VectorXd::Zero(d);
  s.stddev = Eigen::VectorXd::Ones(d);
  for (Eigen::Index j = 0; j < d; ++j) s.names.push_back("x" + std::to_string(j + 1));
  return s;
}

Predictor linear_model(const Eigen::VectorXd& coefficients, double base = 0.0) {
  Predictor::State s;
  s.family = ModelFamily::linear;
  s.coefficients = coefficients;
  s.base = base;
  for (Eigen::Index j = 0; j < coefficients.size(); ++j) s.feature_names.push_back("x" + std::to_string(j + 1));
  return Predictor(std::move(s));
}

// Solves the weighted ridge problem with an unpenalized intercept through its
// normal equations.
Eigen::VectorXd normal_equations(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const Eigen::VectorXd& w,
                                 double lambda, const Eigen::VectorXd& scale, double* intercept) {
  const double sw = w.sum();
  const Eigen::RowVectorXd xbar = (w.transpose() * x) / sw;
  const double ybar = w.dot(y) / sw;
  const Eigen::MatrixXd xc = x.rowwise() - xbar;
  const Eigen::VectorXd yc = y.array() - ybar;
  Eigen::MatrixXd a = xc.transpose() * w.asDiagonal() * xc;
  a.diagonal() += lambda * scale.array().square().matrix();
  const Eigen::VectorXd beta = a.ldlt().solve(xc.transpose() * w.asDiagonal() * yc);
  *intercept = ybar - xbar.dot(beta);
  return beta;
}

TEST(SampleNeighborhood, SelfRowAndConstantFeature) {
  FeatureStats s = unit_stats(3);
  s.stddev(1) = 0.0;
  const Eigen::Vector3d x(0.5, 7.0, -1.0);
  const Eigen::MatrixXd one = sample_neighborhood(x, s, 1, 3);
  ASSERT_EQ(one.rows(), 1);
  EXPECT_EQ(one.row(0).transpose(), x);
  const Eigen::MatrixXd many = sample_neighborhood(x, s, 500, 3);
  EXPECT_TRUE((many.col(1).array() == 7.0).all());
  EXPECT_EQ(many.row(0).transpose(), x);
  EXPECT_THROW(sample_neighborhood(x, s, 0, 3), std::invalid_argument);
}

TEST(SampleNeighborhood, LawOfLargeNumbers) {
  const FeatureStats s = unit_stats(2);
  const Eigen::MatrixXd z = sample_neighborhood(Eigen::Vector2d(3, 3), s, 10000, 17);
  for (int j = 0; j < 2; ++j) {
    const Eigen::VectorXd c = z.col(j).tail(9999);
    const double mean = c.mean();
    EXPECT_NEAR(mean, 0.0, 0.05);
    EXPECT_NEAR(std::sqrt((c.array() - mean).square().mean()), 1.0, 0.05);
  }
}

TEST(KernelWeight, ClosedForms) {
  const Eigen::Vector2d x(1, 2);
  const Eigen::Vector2d scale(2, 1);
  EXPECT_EQ(kernel_weight(x, x, 0.5, scale), 1.0);
  const Eigen::Vector2d z(1 + 2 * 0.6, 2 + 0.8);  // z-scored distance sqrt(0.36 + 0.64) = 1
  EXPECT_NEAR(kernel_weight(x, z, 1.0, scale), std::exp(-1.0), 1e-15);
  EXPECT_THROW(kernel_weight(x, z, 0.0, scale), std::invalid_argument);
}

TEST(KernelWeight, StrictlyDecreasingInDistance) {
  const Eigen::Vector2d x(0, 0), scale(1, 1);
  double previous = 2.0;
  for (double d = 0.0; d < 5.0; d += 0.25) {
    const double w = kernel_weight(x, Eigen::Vector2d(d, 0), 1.5, scale);
    EXPECT_LT(w, previous);
    EXPECT_GT(w, 0.0);
    previous = w;
  }
}

struct Neighbourhood {
  Eigen::MatrixXd samples;
  Eigen::VectorXd weights;
};

Neighbourhood neighbourhood(Eigen::Index d, int n, std::uint64_t seed, double width = 1.5) {
  const FeatureStats s = unit_stats(d);
  const Eigen::VectorXd x = Eigen::VectorXd::LinSpaced(d, -0.5, 0.5);
  Neighbourhood nb;
  nb.samples = sample_neighborhood(x, s, n, seed);
  nb.weights = kernel_weights(x, nb.samples, width, s.scale());
  return nb;
}

TEST(FitLocalModel, RecoversSingleCoefficient) {
  const Neighbourhood nb = neighbourhood(5, 2000, 1);
  const Eigen::VectorXd f = 3.0 * nb.samples.col(0);
  LimeConfig c;
  c.k_features = 1;
  const Explanation e = fit_local_model(nb.samples, nb.weights, f, unit_stats(5), c);
  ASSERT_EQ(e.features.size(), 1u);
  EXPECT_EQ(e.features[0].feature, 0);
  EXPECT_NEAR(e.features[0].weight, 3.0, 0.15);
}

TEST(FitLocalModel, ExactLinearUnpenalized) {
  const Neighbourhood nb = neighbourhood(4, 500, 2);
  const Eigen::VectorXd f = nb.samples.col(0) + nb.samples.col(1);
  LimeConfig c;
  c.k_features = 2;
  c.ridge_lambda = 0.0;
  const Explanation e = fit_local_model(nb.samples, nb.weights, f, unit_stats(4), c);
  const Eigen::VectorXd w = e.dense_weights(4);
  EXPECT_NEAR(w(0), 1.0, 1e-6);
  EXPECT_NEAR(w(1), 1.0, 1e-6);
  EXPECT_NEAR(e.local_fit, 1.0, 1e-9);
  EXPECT_NEAR(e.intercept, 0.0, 1e-9);
}

TEST(FitLocalModel, ConstantBlackBox) {
  const Neighbourhood nb = neighbourhood(3, 100, 3);
  const Explanation e =
      fit_local_model(nb.samples, nb.weights, Eigen::VectorXd::Constant(100, 2.5), unit_stats(3), LimeConfig{});
  EXPECT_TRUE(e.features.empty());
  EXPECT_EQ(e.intercept, 2.5);
  EXPECT_FALSE(e.local_fit_defined());
}

TEST(FitLocalModel, MatchesNormalEquationsOracle) {
  const Neighbourhood nb = neighbourhood(6, 800, 4);
  const auto& z = nb.samples;
  const Eigen::VectorXd f = (z.col(0).array().sin() * 2 + z.col(2).array().square() - z.col(4).array() * 0.5).matrix();
  const FeatureStats stats = unit_stats(6);
  for (const double lambda : {0.0, 1.0, 25.0}) {
    LimeConfig c;
    c.k_features = 3;
    c.ridge_lambda = lambda;
    const Explanation e = fit_local_model(z, nb.weights, f, stats, c);
    ASSERT_EQ(e.features.size(), 3u);
    Eigen::MatrixXd sel(z.rows(), 3);
    Eigen::VectorXd scale(3);
    for (int j = 0; j < 3; ++j) {
      sel.col(j) = z.col(e.features[j].feature);
      scale(j) = 1.0;
    }
    const Eigen::VectorXd w = nb.weights * (static_cast<double>(z.rows()) / nb.weights.sum());
    double b0 = 0;
    const Eigen::VectorXd beta = normal_equations(sel, f, w, lambda, scale, &b0);
    for (int j = 0; j < 3; ++j) EXPECT_NEAR(e.features[j].weight, beta(j), 1e-8) << lambda;
    EXPECT_NEAR(e.intercept, b0, 1e-8);
  }
}

TEST(FitLocalModel, WeightScalingInvariance) {
  const Neighbourhood nb = neighbourhood(5, 600, 5);
  const Eigen::VectorXd f = (nb.samples.col(1).array().cube() + nb.samples.col(3).array()).matrix();
  LimeConfig c;
  c.k_features = 2;
  const Explanation a = fit_local_model(nb.samples, nb.weights, f, unit_stats(5), c);
  const Explanation b = fit_local_model(nb.samples, nb.weights * 1e3, f, unit_stats(5), c);
  ASSERT_EQ(a.features.size(), b.features.size());
  for (std::size_t j = 0; j < a.features.size(); ++j) {
    EXPECT_EQ(a.features[j].feature, b.features[j].feature);
    EXPECT_NEAR(a.features[j].weight, b.features[j].weight, 1e-9);
  }
}

TEST(FitLocalModel, SparsityAndConstantFeatures) {
  FeatureStats stats = unit_stats(6);
  stats.stddev(2) = 0.0;
  const Eigen::VectorXd x = Eigen::VectorXd::Zero(6);
  const Eigen::MatrixXd z = sample_neighborhood(x, stats, 400, 6);
  const Eigen::VectorXd w = kernel_weights(x, z, 2.0, stats.scale());
  const Eigen::VectorXd f = z * Eigen::VectorXd::LinSpaced(6, 1, 6);
  for (int k = 1; k <= 6; ++k) {
    LimeConfig c;
    c.k_features = k;
    const Explanation e = fit_local_model(z, w, f, stats, c);
    EXPECT_LE(static_cast<int>(e.features.size()), k);
    for (const auto& fw : e.features) EXPECT_NE(fw.feature, 2);
  }
}

TEST(FitLocalModel, KernelTooNarrow) {
  const Neighbourhood nb = neighbourhood(3, 50, 7);
  Eigen::VectorXd w = Eigen::VectorXd::Zero(50);
  LimeConfig c;
  c.k_features = 2;
  EXPECT_THROW(fit_local_model(nb.samples, w, nb.samples.col(0), unit_stats(3), c), KernelTooNarrow);
  w(0) = 1.0;
  w(1) = 1.0;
  EXPECT_THROW(fit_local_model(nb.samples, w, nb.samples.col(0), unit_stats(3), c), KernelTooNarrow);
}

TEST(LimeConfig, Validation) {
  LimeConfig c;
  c.k_features = 0;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = LimeConfig{};
  c.n_samples = c.k_features;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = LimeConfig{};
  c.ridge_lambda = -1;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  EXPECT_NEAR(LimeConfig{}.resolved_kernel_width(16), 3.0, 1e-15);
}

TEST(Explain, LinearModelWithinFivePercent) {
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(8);
  beta.head(3) << 3, -2, 1;
  const Predictor model = linear_model(beta, 0.5);
  const FeatureStats stats = unit_stats(8);
  LimeConfig c;
  c.k_features = 3;
  c.n_samples = 2000;
  c.seed = 11;
  const Eigen::VectorXd x = Eigen::VectorXd::LinSpaced(8, -1, 1);
  const Explanation e = explain(model, x, stats, c, 4);
  ASSERT_EQ(e.features.size(), 3u);
  EXPECT_EQ(e.instance_id, 4);
  for (const auto& f : e.features) {
    ASSERT_LT(f.feature, 3);
    EXPECT_NEAR(f.weight, beta(f.feature), 0.05 * std::abs(beta(f.feature)));
  }
  EXPECT_EQ(e.features[0].feature, 0);  // ordered by |weight| * std
  EXPECT_NEAR(e.model_prediction, model.predict(x.transpose())(0), 1e-12);
}

TEST(Explain, DeterministicAndWidthChecked) {
  const Predictor model = linear_model(Eigen::Vector3d(1, 2, 3));
  LimeConfig c;
  c.n_samples = 300;
  c.k_features = 2;
  c.seed = 5;
  const Eigen::Vector3d x(0.1, 0.2, 0.3);
  const Explanation a = explain(model, x, unit_stats(3), c);
  const Explanation b = explain(model, x, unit_stats(3), c);
  ASSERT_EQ(a.features.size(), b.features.size());
  for (std::size_t j = 0; j < a.features.size(); ++j) EXPECT_EQ(a.features[j].weight, b.features[j].weight);
  EXPECT_EQ(a.intercept, b.intercept);
  EXPECT_THROW(explain(model, Eigen::Vector2d(0, 0), unit_stats(2), c), std::invalid_argument);
}

TEST(FeatureStats, PopulationMoments) {
  Eigen::MatrixXd x(4, 2);
  x << 1, 5, 2, 5, 3, 5, 4, 5;
  const FeatureStats s = FeatureStats::from_matrix(x, {"a", "b"});
  EXPECT_DOUBLE_EQ(s.mean(0), 2.5);
  EXPECT_DOUBLE_EQ(s.stddev(0), std::sqrt(1.25));
  EXPECT_TRUE(s.is_constant(1));
  EXPECT_EQ(s.scale()(1), 1.0);
}

}  // namespace
}  // namespace panellime
