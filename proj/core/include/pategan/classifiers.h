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

// Binary classifiers for the utility benchmark and the membership attack.

#ifndef PATEGAN_CLASSIFIERS_H_
#define PATEGAN_CLASSIFIERS_H_

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "pategan/matrix.h"
#include "pategan/nn.h"
#include "pategan/rng.h"

namespace pategan {

enum class ClassifierKind {
  kLogReg,
  kGaussianNb,
  kDecisionTree,
  kRandomForest,
  kMlp,
};

struct ClassifierOptions {
  // L2-penalized logistic regression (intercept unpenalized), Newton/IRLS.
  double logreg_c = 1.0;
  int logreg_max_steps = 100;
  double logreg_tol = 1e-8;

  double nb_var_smoothing = 1e-9;

  int tree_max_depth = -1;  // standalone decision tree; -1 = unlimited
  size_t min_samples_split = 2;

  size_t forest_trees = 100;
  int forest_max_depth = 8;
  // 0 = round(sqrt(d)), at least 1.
  size_t forest_max_features = 0;
  int workers = 1;

  std::vector<size_t> mlp_hidden = {100};
  int mlp_epochs = 200;
  double mlp_learning_rate = 1e-3;
  size_t mlp_batch = 200;
};

struct LogRegFit {
  Vector weights;
  double intercept = 0.0;
  int steps = 0;
  bool converged = false;
};

// y in {0, 1} (soft labels are accepted).
LogRegFit FitLogisticRegression(const Matrix& x, const Vector& y, double c,
                                int max_steps, double tol);

// CART with Gini impurity and midpoint thresholds; leaves store the
// positive-class fraction.
class DecisionTree {
 public:
  struct Node {
    int feature = -1;  // -1 for leaves
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    double value = 0.0;
  };

  // rows: indices into x/y (duplicates allowed, as for bootstrap samples).
  // max_features = 0 considers every feature at each split.
  static DecisionTree Fit(const Matrix& x, const Vector& y,
                          const std::vector<size_t>& rows, int max_depth,
                          size_t min_samples_split, size_t max_features,
                          Rng& rng);

  double Score(const double* row) const;
  const std::vector<Node>& nodes() const { return nodes_; }
  int Depth() const;

 private:
  std::vector<Node> nodes_;
};

class TrainedClassifier {
 public:
  ClassifierKind kind() const { return kind_; }
  size_t num_features() const { return num_features_; }
  // Single-class training input; every score equals the class seen.
  bool degenerate() const { return degenerate_; }

  // One score in [0, 1] per row. Throws ConfigError on width mismatch.
  Vector PredictScores(const Matrix& x) const;

  friend TrainedClassifier FitClassifier(ClassifierKind, const Matrix&,
                                         const Vector&,
                                         const ClassifierOptions&, uint64_t);
  // A forest made of the given trees (mean of their scores).
  static TrainedClassifier FromTrees(std::vector<DecisionTree> trees,
                                     size_t num_features);

 private:
  ClassifierKind kind_ = ClassifierKind::kLogReg;
  size_t num_features_ = 0;
  bool degenerate_ = false;
  double constant_ = 0.0;

  LogRegFit logreg_;
  // Gaussian NB: per class (0, 1) means, variances and log priors.
  Matrix nb_means_;
  Matrix nb_vars_;
  double nb_log_prior_[2] = {0.0, 0.0};
  std::vector<DecisionTree> trees_;
  std::shared_ptr<const Mlp> mlp_;
};

// Deterministic per seed. Throws DataError on non-finite features and
// ConfigError on shape problems or fewer than two rows.
TrainedClassifier FitClassifier(ClassifierKind kind, const Matrix& x,
                                const Vector& y,
                                const ClassifierOptions& options,
                                uint64_t seed);

const char* ToString(ClassifierKind kind);
ClassifierKind ClassifierKindFromString(const std::string& name);
const std::vector<ClassifierKind>& AllClassifierKinds();

}  // namespace pategan

#endif  // PATEGAN_CLASSIFIERS_H_
