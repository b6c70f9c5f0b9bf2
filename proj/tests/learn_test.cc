// Copyright 2026 The echotrace Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "echotrace/error.h"
#include "echotrace/learn.h"
#include "echotrace/metrics.h"
#include "test_support.h"

namespace echotrace {
namespace {

Matrix random_matrix(std::size_t n, std::size_t d, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0, 1);
  Matrix x(n, d);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j) x(i, j) = u(rng);
  }
  return x;
}

TEST(LogReg, GradientMatchesCentralDifferences) {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> g(0, 1);
  const Matrix x = random_matrix(40, 6, rng);
  std::vector<int> y(40);
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = (i % 3 == 0);
  LogRegConfig cfg;
  cfg.c = 2.0;
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> w(7);
    for (double& v : w) v = g(rng);
    std::vector<double> grad;
    logreg_objective(x, y, cfg, w, &grad);
    for (std::size_t k = 0; k < w.size(); ++k) {
      const double h = 1e-6;
      auto plus = w;
      auto minus = w;
      plus[k] += h;
      minus[k] -= h;
      const double fd =
          (logreg_objective(x, y, cfg, plus, nullptr) - logreg_objective(x, y, cfg, minus, nullptr)) /
          (2 * h);
      EXPECT_NEAR(grad[k], fd, 1e-5 * std::max(1.0, std::fabs(fd)));
    }
  }
}

TEST(LogReg, ObjectiveByHand) {
  Matrix x(2, 1);
  x(0, 0) = 1;
  x(1, 0) = 0;
  const std::vector<int> y = {1, 0};
  LogRegConfig cfg;
  cfg.c = 0.5;
  const std::vector<double> params = {2.0, -1.0};
  // pos: 0.75 * -ln s(1); neg: 0.25 * -ln(1 - s(-1)); penalty 1/(2C) * 4.
  const double want = 0.75 * std::log1p(std::exp(-1.0)) + 0.25 * std::log1p(std::exp(-1.0)) + 4.0;
  EXPECT_NEAR(logreg_objective(x, y, cfg, params, nullptr), want, 1e-12);
}

TEST(LogReg, BiasOnlyClosedForm) {
  // With no informative features the optimum bias is ln(w+ n+ / (w- n-)).
  Matrix x(50, 1);
  std::vector<int> y(50, 0);
  for (int i = 0; i < 10; ++i) y[i] = 1;
  LogRegConfig cfg;
  cfg.tolerance = 1e-10;
  const LogRegModel m = train_logreg(x, y, cfg);
  EXPECT_NEAR(m.bias, std::log(0.75 * 10 / (0.25 * 40)), 1e-6);
  EXPECT_NEAR(m.weights[0], 0.0, 1e-9);
}

TEST(LogReg, ObjectiveNonIncreasingAndSeparates) {
  std::mt19937_64 rng(5);
  const Matrix x = random_matrix(200, 3, rng);
  std::vector<int> y(200);
  for (std::size_t i = 0; i < 200; ++i) y[i] = x(i, 0) + 0.2 * x(i, 1) > 0.6;
  LogRegConfig cfg;
  cfg.c = 1000;
  LogRegTrace trace;
  const LogRegModel m = train_logreg(x, y, cfg, &trace);
  ASSERT_GE(trace.objective.size(), 2u);
  for (std::size_t i = 1; i < trace.objective.size(); ++i) {
    EXPECT_LE(trace.objective[i], trace.objective[i - 1] + 1e-12);
  }
  EXPECT_TRUE(trace.converged);
  std::vector<int> pred(200);
  for (std::size_t i = 0; i < 200; ++i) pred[i] = m.predict_proba(x.row(i)) >= 0.5;
  EXPECT_GT(f1_score(pred, y), 0.9);
  EXPECT_THROW(train_logreg(x, std::vector<int>(200, 0), cfg), std::invalid_argument);
}

TEST(Gbt, LossNonIncreasingOverRounds) {
  std::mt19937_64 rng(9);
  const Matrix x = random_matrix(300, 4, rng);
  std::bernoulli_distribution noise(0.1);
  std::vector<int> y(300);
  for (std::size_t i = 0; i < 300; ++i) y[i] = (x(i, 0) * x(i, 1) > 0.25) != noise(rng);
  GbtConfig cfg;
  cfg.n_trees = 50;
  cfg.pos_weight = 3;
  cfg.min_child_weight = 3;
  GbtTrace trace;
  const GbtModel m = train_gbt(x, y, cfg, &trace);
  ASSERT_EQ(trace.weighted_logloss.size(), 51u);
  for (std::size_t i = 1; i < trace.weighted_logloss.size(); ++i) {
    EXPECT_LE(trace.weighted_logloss[i], trace.weighted_logloss[i - 1] + 1e-12) << i;
  }
  EXPECT_EQ(m.trees.size(), 50u);
  for (const Tree& t : m.trees) EXPECT_LE(t.depth(), cfg.max_depth);
  EXPECT_NEAR(m.base_score, std::log(3.0 * std::count(y.begin(), y.end(), 1) /
                                     std::count(y.begin(), y.end(), 0)),
              1e-12);
}

TEST(Gbt, RiggedFeatureAtEveryRoot) {
  std::mt19937_64 rng(13);
  Matrix x = random_matrix(400, 5, rng);
  std::vector<int> y(400);
  for (std::size_t i = 0; i < 400; ++i) y[i] = x(i, 3) > 0.5;
  GbtConfig cfg;
  cfg.n_trees = 30;
  const GbtModel m = train_gbt(x, y, cfg);
  for (const Tree& t : m.trees) {
    ASSERT_FALSE(t.nodes[0].leaf());
    EXPECT_EQ(t.nodes[0].feature, 3);
  }
  const auto imp = feature_importance(m);
  EXPECT_NEAR(std::accumulate(imp.begin(), imp.end(), 0.0), 100.0, 1e-6);
  for (double v : imp) EXPECT_GE(v, 0.0);
  EXPECT_GT(imp[3], 50.0);
}

TEST(Gbt, ThresholdIsMidpointWithStrictLeft) {
  Matrix x(4, 1);
  x(0, 0) = 0;
  x(1, 0) = 1;
  x(2, 0) = 3;
  x(3, 0) = 4;
  const std::vector<int> y = {0, 0, 1, 1};
  GbtConfig cfg;
  cfg.n_trees = 1;
  cfg.min_child_weight = 0;
  cfg.max_depth = 1;
  const GbtModel m = train_gbt(x, y, cfg);
  ASSERT_FALSE(m.trees[0].nodes[0].leaf());
  EXPECT_DOUBLE_EQ(m.trees[0].nodes[0].threshold, 2.0);
}

TEST(Gbt, InvariantUnderMonotoneTransform) {
  std::mt19937_64 rng(17);
  Matrix x = random_matrix(200, 3, rng);
  std::vector<int> y(200);
  for (std::size_t i = 0; i < 200; ++i) y[i] = x(i, 0) + x(i, 2) > 1;
  Matrix z = x;
  for (std::size_t i = 0; i < 200; ++i) {
    for (std::size_t j = 0; j < 3; ++j) z(i, j) = std::exp(3 * x(i, j)) + 7;
  }
  GbtConfig cfg;
  cfg.n_trees = 10;
  const GbtModel a = train_gbt(x, y, cfg);
  const GbtModel b = train_gbt(z, y, cfg);
  for (std::size_t i = 0; i < 200; ++i) {
    EXPECT_NEAR(a.margin(x.row(i)), b.margin(z.row(i)), 1e-9);
  }
}

TEST(Gbt, DeterministicAndNoSplitOnConstantData) {
  std::mt19937_64 rng(19);
  Matrix x = random_matrix(100, 2, rng);
  std::vector<int> y(100);
  for (std::size_t i = 0; i < 100; ++i) y[i] = i % 2;
  GbtConfig cfg;
  cfg.n_trees = 5;
  const GbtModel a = train_gbt(x, y, cfg);
  const GbtModel b = train_gbt(x, y, cfg);
  for (std::size_t i = 0; i < 100; ++i) EXPECT_EQ(a.margin(x.row(i)), b.margin(x.row(i)));

  Matrix c(10, 2);
  const GbtModel flat = train_gbt(c, std::vector<int>{0, 1, 0, 1, 0, 1, 0, 1, 0, 1}, cfg);
  for (const Tree& t : flat.trees) EXPECT_TRUE(t.nodes[0].leaf());
  for (double v : feature_importance(flat)) EXPECT_EQ(v, 0.0);
}

std::vector<CandidateRow> rows_from(const std::vector<AnnotatedTriple>& triples) {
  const CorpusStats stats = build_corpus_stats(triples);
  return featurize_triples(triples, stats, Taxonomy{}).rows;
}

TEST(Model, SerializationPreservesPredictions) {
  const auto corpus = testing::make_signal_corpus(200, 1);
  const CorpusStats stats = build_corpus_stats(corpus.train);
  const auto train = featurize_triples(corpus.train, stats, Taxonomy{}).rows;
  const auto val = featurize_triples(corpus.validation, stats, Taxonomy{}).rows;
  testing::TempDir dir("model");
  for (ModelKind kind : {ModelKind::kLogReg, ModelKind::kGbt}) {
    GridSpec grid;
    grid.logreg = {LogRegConfig{}};
    GbtConfig g;
    g.n_trees = 10;
    grid.gbt = {g};
    const auto features = all_feature_indices();
    const GridResult r = grid_search(kind, train, val, grid, features);
    r.model.save(dir.path() / "m.json");
    const TrainedModel back = TrainedModel::load(dir.path() / "m.json");
    EXPECT_EQ(back.kind, kind);
    for (const auto& row : val) {
      EXPECT_EQ(back.predict_proba(row.features), r.model.predict_proba(row.features));
    }
  }
  nlohmann::json bad = nlohmann::json::parse(R"({"schema_version": 99})");
  EXPECT_THROW(TrainedModel::from_json(bad), SchemaError);
}

TEST(Grid, DefaultsAndTieBreak) {
  EXPECT_EQ(GridSpec::default_logreg().size(), 18u);
  EXPECT_EQ(GridSpec::default_gbt().size(), 27u);
  EXPECT_EQ(GridSpec::default_gbt().front().n_trees, 1000);

  const auto corpus = testing::make_signal_corpus(100, 2);
  const auto train = rows_from(corpus.train);
  const auto val = rows_from(corpus.validation);
  GridSpec grid;
  grid.logreg = {LogRegConfig{}, LogRegConfig{}};
  const auto features = all_feature_indices();
  const GridResult r = grid_search(ModelKind::kLogReg, train, val, grid, features);
  ASSERT_EQ(r.points.size(), 2u);
  EXPECT_EQ(r.points[0].validation_f1, r.points[1].validation_f1);
  EXPECT_EQ(r.best, 0u);
  EXPECT_THROW(grid_search(ModelKind::kLogReg, train, {}, grid, features), std::invalid_argument);
  EXPECT_THROW(grid_search(ModelKind::kGbt, train, val, grid, features), std::invalid_argument);
}

TEST(Random, BaselineCalibration) {
  const auto a = random_baseline(10000, 0.15, 42);
  EXPECT_EQ(a, random_baseline(10000, 0.15, 42));
  EXPECT_NE(a, random_baseline(10000, 0.15, 43));
  const double rate = std::accumulate(a.begin(), a.end(), 0.0) / a.size();
  EXPECT_NEAR(rate, 0.15, 0.02);
  EXPECT_THROW(random_baseline(1, 1.5, 0), std::invalid_argument);
}

}  // namespace
}  // namespace echotrace
