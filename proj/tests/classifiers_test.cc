// Copyright 2026 The PATE-GAN Audit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "pategan/classifiers.h"

#include <cmath>

#include <gtest/gtest.h>

#include "pategan/errors.h"
#include "pategan/metrics.h"

namespace pategan {
namespace {

double Accuracy(const Vector& scores, const Vector& y) {
  int ok = 0;
  for (Eigen::Index i = 0; i < y.size(); ++i) ok += (scores[i] > 0.5) == (y[i] > 0.5);
  return static_cast<double>(ok) / static_cast<double>(y.size());
}

void Clusters(Rng& rng, int n, double center, double sd, Matrix& x, Vector& y) {
  x.resize(n, 2);
  y.resize(n);
  for (int i = 0; i < n; ++i) {
    const double label = i % 2;
    const double c = label > 0 ? center : -center;
    x(i, 0) = c + sd * rng.Normal();
    x(i, 1) = c + sd * rng.Normal();
    y[i] = label;
  }
}

TEST(LogReg, OneDimensionalSymmetry) {
  Matrix x(2, 1);
  x << -1.0, 1.0;
  Vector y(2);
  y << 0.0, 1.0;
  const TrainedClassifier c = FitClassifier(ClassifierKind::kLogReg, x, y, {}, 1);
  const Vector s = c.PredictScores(x);
  EXPECT_GT(s[1], 0.5);
  EXPECT_LT(s[0], 0.5);
  const LogRegFit fit = FitLogisticRegression(x, y, 1.0, 100, 1e-8);
  EXPECT_GT(fit.weights[0], 0.0);
  EXPECT_TRUE(fit.converged);
}

TEST(LogReg, ScoreIsSigmoidOfLinearForm) {
  Rng rng(2);
  Matrix x;
  Vector y;
  Clusters(rng, 100, 0.5, 1.0, x, y);
  const LogRegFit fit = FitLogisticRegression(x, y, 1.0, 100, 1e-8);
  const TrainedClassifier c = FitClassifier(ClassifierKind::kLogReg, x, y, {}, 1);
  const Vector s = c.PredictScores(x);
  for (Eigen::Index i = 0; i < 100; ++i) {
    const double z = x.row(i).dot(fit.weights) + fit.intercept;
    EXPECT_NEAR(s[i], 1.0 / (1.0 + std::exp(-z)), 1e-12);
  }
}

TEST(LogReg, StationaryPoint) {
  // Gradient of the penalized log-likelihood vanishes at the fit.
  Rng rng(3);
  Matrix x;
  Vector y;
  Clusters(rng, 80, 0.3, 1.0, x, y);
  const double c = 0.7;
  const LogRegFit fit = FitLogisticRegression(x, y, c, 100, 1e-12);
  Vector gw = fit.weights / c;
  double gb = 0.0;
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    const double p = 1.0 / (1.0 + std::exp(-(x.row(i).dot(fit.weights) + fit.intercept)));
    gw += (p - y[i]) * x.row(i).transpose();
    gb += p - y[i];
  }
  EXPECT_LT(gw.cwiseAbs().maxCoeff(), 1e-8);
  EXPECT_LT(std::abs(gb), 1e-8);
}

TEST(DecisionTree, XorFourPoints) {
  Matrix x(4, 2);
  x << 0, 0, 0, 1, 1, 0, 1, 1;
  Vector y(4);
  y << 0, 1, 1, 0;
  ClassifierOptions o;
  o.tree_max_depth = 2;
  const TrainedClassifier c = FitClassifier(ClassifierKind::kDecisionTree, x, y, o, 1);
  EXPECT_EQ(Accuracy(c.PredictScores(x), y), 1.0);
}

TEST(GaussianNb, SeparatedClusters) {
  Rng rng(4);
  Matrix x, xt;
  Vector y, yt;
  Clusters(rng, 200, 5.0, 0.1, x, y);
  Clusters(rng, 200, 5.0, 0.1, xt, yt);
  const TrainedClassifier c = FitClassifier(ClassifierKind::kGaussianNb, x, y, {}, 1);
  EXPECT_GE(Accuracy(c.PredictScores(xt), yt), 0.99);
}

TEST(AllKinds, LearnSeparableData) {
  Rng rng(5);
  Matrix x, xt;
  Vector y, yt;
  Clusters(rng, 300, 1.5, 0.6, x, y);
  Clusters(rng, 300, 1.5, 0.6, xt, yt);
  ClassifierOptions o;
  o.forest_trees = 20;
  o.mlp_epochs = 50;
  for (ClassifierKind k : AllClassifierKinds()) {
    const TrainedClassifier c = FitClassifier(k, x, y, o, 6);
    const Vector s = c.PredictScores(xt);
    EXPECT_GE(s.minCoeff(), 0.0);
    EXPECT_LE(s.maxCoeff(), 1.0);
    EXPECT_GE(Auroc(yt, s).value, 0.95) << ToString(k);
    EXPECT_EQ(ClassifierKindFromString(ToString(k)), k);
  }
}

TEST(AllKinds, DeterministicPerSeed) {
  Rng rng(7);
  Matrix x;
  Vector y;
  Clusters(rng, 120, 0.5, 1.0, x, y);
  ClassifierOptions o;
  o.forest_trees = 10;
  o.mlp_epochs = 10;
  for (ClassifierKind k : AllClassifierKinds()) {
    const Vector a = FitClassifier(k, x, y, o, 9).PredictScores(x);
    const Vector b = FitClassifier(k, x, y, o, 9).PredictScores(x);
    EXPECT_TRUE(a == b) << ToString(k);
  }
}

TEST(Degenerate, SingleClassGivesConstant) {
  Rng rng(8);
  Matrix x(10, 2);
  for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = rng.Normal();
  const Vector ones = Vector::Ones(10);
  for (ClassifierKind k : AllClassifierKinds()) {
    const TrainedClassifier c = FitClassifier(k, x, ones, {}, 1);
    EXPECT_TRUE(c.degenerate());
    const Vector s = c.PredictScores(x);
    EXPECT_TRUE((s.array() == s[0]).all());
  }
}

TEST(Errors, ShapesAndNaN) {
  Matrix x = Matrix::Zero(4, 2);
  Vector y(4);
  y << 0, 1, 0, 1;
  const TrainedClassifier c = FitClassifier(ClassifierKind::kLogReg, x, y, {}, 1);
  EXPECT_THROW(c.PredictScores(Matrix::Zero(2, 3)), ConfigError);
  x(0, 0) = std::nan("");
  EXPECT_THROW(FitClassifier(ClassifierKind::kLogReg, x, y, {}, 1), DataError);
  EXPECT_THROW(FitClassifier(ClassifierKind::kLogReg, Matrix::Zero(1, 2), Vector::Zero(1), {}, 1),
               ConfigError);
}

TEST(Forest, OneTreeEqualsTree) {
  Rng rng(10);
  Matrix x;
  Vector y;
  Clusters(rng, 100, 0.4, 1.0, x, y);
  std::vector<size_t> rows(100);
  for (size_t i = 0; i < 100; ++i) rows[i] = i;
  Rng tree_rng(3);
  const DecisionTree t = DecisionTree::Fit(x, y, rows, 4, 2, 0, tree_rng);
  const TrainedClassifier one = TrainedClassifier::FromTrees({t}, 2);
  const TrainedClassifier three = TrainedClassifier::FromTrees({t, t, t}, 2);
  const Vector s1 = one.PredictScores(x);
  const Vector s3 = three.PredictScores(x);
  for (Eigen::Index i = 0; i < 100; ++i) {
    EXPECT_DOUBLE_EQ(s1[i], t.Score(x.row(i).data()));
    EXPECT_DOUBLE_EQ(s3[i], s1[i]);
  }
  EXPECT_LE(t.Depth(), 4);
}

TEST(Forest, WorkersDoNotChangeResult) {
  Rng rng(11);
  Matrix x;
  Vector y;
  Clusters(rng, 150, 0.4, 1.0, x, y);
  ClassifierOptions a;
  a.forest_trees = 16;
  ClassifierOptions b = a;
  b.workers = 4;
  EXPECT_TRUE(FitClassifier(ClassifierKind::kRandomForest, x, y, a, 5).PredictScores(x) ==
              FitClassifier(ClassifierKind::kRandomForest, x, y, b, 5).PredictScores(x));
}

}  // namespace
}  // namespace pategan
