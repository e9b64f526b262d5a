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

#include "panellime/models.h"

#include <gtest/gtest.h>

#include "panellime/metrics.h"

namespace panellime {
namespace {

std::vector<std::string> names(Eigen::Index n) {
  std::vector<std::string> out;
  for (Eigen::Index j = 0; j < n; ++j) out.push_back("x" + std::to_string(j + 1));
  return out;
}

struct Data {
  Eigen::MatrixXd x;
  Eigen::VectorXd y;
};

Data linear_data(int n, std::uint64_t seed, double noise) {
  Rng rng(seed);
  Data d{Eigen::MatrixXd(n, 4), Eigen::VectorXd(n)};
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < 4; ++j) d.x(i, j) = rng.normal();
    d.y(i) = 3 * d.x(i, 0) - 2 * d.x(i, 1) + noise * rng.normal();
  }
  return d;
}

TEST(Fit, SingleLeafPredictsMean) {
  Eigen::MatrixXd x(2, 1);
  x << 0, 1;
  Eigen::VectorXd y(2);
  y << 1, 3;
  Hyperparameters hp;
  hp.n_trees = 1;
  hp.max_depth = 0;
  hp.learning_rate = 1.0;
  for (const auto family : {ModelFamily::random_forest, ModelFamily::extra_trees, ModelFamily::gradient_boosting}) {
    const Predictor p = fit(family, x, y, names(1), hp, 0);
    Eigen::MatrixXd probe(3, 1);
    probe << -5, 0.5, 7;
    if (family == ModelFamily::random_forest) continue;  // a bootstrap may draw one row twice
    EXPECT_TRUE(p.predict(probe).isApprox(Eigen::VectorXd::Constant(3, 2.0))) << to_string(family);
  }
}

TEST(Fit, BoostingFitsStep) {
  Eigen::MatrixXd x(100, 1);
  Eigen::VectorXd y(100);
  for (int i = 0; i < 100; ++i) {
    x(i, 0) = i / 100.0;
    y(i) = x(i, 0) < 0.5 ? 0.0 : 1.0;
  }
  Hyperparameters hp;
  hp.n_trees = 200;
  hp.max_depth = 2;
  hp.learning_rate = 0.1;
  const Predictor p = fit(ModelFamily::gradient_boosting, x, y, names(1), hp, 3);
  EXPECT_GE(r_squared(y, p.predict(x)), 0.99);
}

TEST(Fit, BoostingTrainingErrorMonotone) {
  const Data d = linear_data(200, 5, 0.0);
  Hyperparameters hp;
  hp.n_trees = 60;
  hp.max_depth = 3;
  const Predictor p = fit(ModelFamily::gradient_boosting, d.x, d.y, names(4), hp, 1);
  double previous = std::numeric_limits<double>::infinity();
  for (std::size_t t = 0; t <= 60; t += 5) {
    const double mse = mean_squared_error(d.y, p.predict_staged(d.x, t));
    EXPECT_LE(mse, previous + 1e-12);
    previous = mse;
  }
}

TEST(Fit, DeterministicUnderSeed) {
  const Data d = linear_data(150, 2, 0.1);
  Hyperparameters hp;
  hp.n_trees = 20;
  hp.max_features = 0.5;
  hp.subsample = 0.7;
  for (const auto family : {ModelFamily::random_forest, ModelFamily::extra_trees, ModelFamily::gradient_boosting,
                            ModelFamily::linear}) {
    const Eigen::VectorXd a = fit(family, d.x, d.y, names(4), hp, 9).predict(d.x);
    const Eigen::VectorXd b = fit(family, d.x, d.y, names(4), hp, 9).predict(d.x);
    EXPECT_TRUE(a.cwiseEqual(b).all()) << to_string(family);
  }
}

TEST(Fit, ForestPredictionsWithinTargetRange) {
  const Data d = linear_data(120, 4, 0.5);
  Hyperparameters hp;
  hp.n_trees = 30;
  const Data probe = linear_data(200, 99, 0.0);
  for (const auto family : {ModelFamily::random_forest, ModelFamily::extra_trees}) {
    const Eigen::VectorXd p = fit(family, d.x, d.y, names(4), hp, 1).predict(probe.x * 3.0);
    EXPECT_GE(p.minCoeff(), d.y.minCoeff());
    EXPECT_LE(p.maxCoeff(), d.y.maxCoeff());
  }
}

TEST(Fit, Errors) {
  Eigen::MatrixXd x(3, 1);
  x << 1, kMissing, 3;
  Eigen::VectorXd y(3);
  y << 1, 2, 3;
  EXPECT_THROW(fit(ModelFamily::linear, x, y, names(1), {}, 0), DataError);
  EXPECT_THROW(fit(ModelFamily::linear, x.topRows(1), y.head(1), names(1), {}, 0), std::invalid_argument);
}

TEST(Fit, ZeroVarianceTargetGivesConstant) {
  const Data d = linear_data(20, 1, 0);
  const Eigen::VectorXd y = Eigen::VectorXd::Constant(20, 4.5);
  const Predictor p = fit(ModelFamily::gradient_boosting, d.x, y, names(4), {}, 0);
  EXPECT_TRUE(p.predict(d.x).isApprox(y));
}

TEST(Predict, LinearDotProductAndShapes) {
  Eigen::MatrixXd x(3, 2);
  x << 1, 0, 0, 1, 1, 1;
  Eigen::VectorXd y(3);
  y << 3, 0, 3;
  const Predictor p = fit(ModelFamily::linear, x, y, names(2), {}, 0);
  Eigen::MatrixXd probe(1, 2);
  probe << 2, 9;
  EXPECT_NEAR(p.predict(probe)(0), 6.0, 1e-9);
  EXPECT_EQ(p.predict(Eigen::MatrixXd(0, 2)).size(), 0);
  EXPECT_THROW(p.predict(Eigen::MatrixXd(1, 3)), std::invalid_argument);
  const Predictor c = Predictor::constant(1.5, ModelFamily::linear, names(2));
  EXPECT_TRUE(c.predict(x).isApprox(Eigen::VectorXd::Constant(3, 1.5)));
}

TEST(Predict, RepeatedCallsAgreeBitwise) {
  const Data d = linear_data(100, 8, 0.2);
  const Predictor p = fit(ModelFamily::extra_trees, d.x, d.y, names(4), {}, 4);
  EXPECT_TRUE(p.predict(d.x).cwiseEqual(p.predict(d.x)).all());
}

TEST(Search, SingleTrial) {
  const Data d = linear_data(100, 1, 0.1);
  SearchConfig c;
  c.max_trials = 1;
  const SearchResult r = budgeted_search(d.x, d.y, names(4), c);
  EXPECT_EQ(r.report.trials.size(), 1u);
  EXPECT_EQ(r.report.best_index, 0u);
}

TEST(Search, HeldOutFitOnLinearSignal) {
  const Data d = linear_data(500, 12, 0.1);
  const Data held = linear_data(300, 13, 0.1);
  SearchConfig c;
  c.max_trials = 25;
  c.seed = 1;
  const SearchResult r = budgeted_search(d.x, d.y, names(4), c);
  EXPECT_GE(r_squared(held.y, r.model.predict(held.x)), 0.9);
  const auto& trials = r.report.trials;
  for (const auto& t : trials) EXPECT_LE(t.validation_score, trials[r.report.best_index].validation_score);
}

TEST(Search, SeedsGiveWellFormedReports) {
  const Data d = linear_data(80, 3, 0.1);
  for (const std::uint64_t seed : {1u, 2u}) {
    SearchConfig c;
    c.max_trials = 4;
    c.seed = seed;
    const SearchResult r = budgeted_search(d.x, d.y, names(4), c);
    EXPECT_EQ(r.report.trials.size(), 4u);
    EXPECT_LT(r.report.best_index, 4u);
    EXPECT_EQ(r.model.n_features(), 4);
  }
}

TEST(Search, ConfigValidation) {
  SearchConfig c;
  c.max_trials = 0;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = SearchConfig{};
  c.validation_fraction = 1.0;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = SearchConfig{};
  c.metric = "mae";
  EXPECT_THROW(c.validate(), std::invalid_argument);
}

TEST(Search, WallClockBudgetTooSmall) {
  const Data d = linear_data(400, 3, 0.1);
  SearchConfig c;
  c.time_budget_seconds = 1e-9;
  c.max_trials = 0;
  EXPECT_THROW(budgeted_search(d.x, d.y, names(4), c), SearchBudgetExhausted);
}

TEST(ModelFamily, NamesRoundTrip) {
  for (const auto f : {ModelFamily::random_forest, ModelFamily::extra_trees, ModelFamily::gradient_boosting,
                       ModelFamily::linear}) {
    EXPECT_EQ(parse_model_family(to_string(f)), f);
  }
  EXPECT_THROW(parse_model_family("lstm"), std::invalid_argument);
}

}  // namespace
}  // namespace panellime
