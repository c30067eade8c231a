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

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <thread>
#include <utility>

#include "pategan/errors.h"

namespace pategan {
namespace {

double Sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

void CheckInputs(const Matrix& x, const Vector& y) {
  if (x.rows() != y.size()) throw ConfigError("feature/label row counts differ");
  if (x.rows() < 2) throw ConfigError("classifier needs at least two rows");
  if (x.cols() < 1) throw ConfigError("classifier needs at least one feature");
  if (!x.allFinite()) throw DataError("non-finite feature value");
  if (!y.allFinite()) throw DataError("non-finite label");
}

double Gini(double pos, double n) {
  if (n <= 0.0) return 0.0;
  const double p = pos / n;
  return 2.0 * p * (1.0 - p);
}

}  // namespace

LogRegFit FitLogisticRegression(const Matrix& x, const Vector& y, double c,
                                int max_steps, double tol) {
  if (x.rows() != y.size()) throw ConfigError("feature/label row counts differ");
  if (!(c > 0.0)) throw ConfigError("logistic regression C must be positive");
  const Eigen::Index n = x.rows();
  const Eigen::Index d = x.cols();
  // Augmented design [x, 1]; parameter theta = [w; b].
  Eigen::MatrixXd a(n, d + 1);
  a.leftCols(d) = x;
  a.col(d).setOnes();
  Eigen::VectorXd theta = Eigen::VectorXd::Zero(d + 1);
  Eigen::VectorXd penalty = Eigen::VectorXd::Constant(d + 1, 1.0 / c);
  penalty[d] = 0.0;

  LogRegFit fit;
  for (int step = 0; step < max_steps; ++step) {
    Eigen::VectorXd z = a * theta;
    Eigen::VectorXd p(n);
    Eigen::VectorXd w(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      p[i] = Sigmoid(z[i]);
      w[i] = std::max(p[i] * (1.0 - p[i]), 1e-12);
    }
    Eigen::VectorXd grad = a.transpose() * (p - y) + penalty.cwiseProduct(theta);
    Eigen::MatrixXd hess = a.transpose() * w.asDiagonal() * a;
    hess.diagonal() += penalty;
    // Keeps the system solvable when the intercept column is all that varies.
    hess.diagonal().array() += 1e-12;
    Eigen::VectorXd delta = hess.ldlt().solve(grad);
    if (!delta.allFinite()) throw TrainingError("logistic regression diverged");
    theta -= delta;
    fit.steps = step + 1;
    if (delta.cwiseAbs().maxCoeff() < tol) {
      fit.converged = true;
      break;
    }
  }
  fit.weights = theta.head(d);
  fit.intercept = theta[d];
  return fit;
}

DecisionTree DecisionTree::Fit(const Matrix& x, const Vector& y,
                               const std::vector<size_t>& rows, int max_depth,
                               size_t min_samples_split, size_t max_features,
                               Rng& rng) {
  DecisionTree tree;
  const size_t d = static_cast<size_t>(x.cols());
  const bool subsample = max_features > 0 && max_features < d;

  std::vector<std::pair<double, double>> column;  // (value, label)

  // Returns the node index.
  auto build = [&](auto&& self, std::vector<size_t> idx, int depth) -> int {
    const int node_id = static_cast<int>(tree.nodes_.size());
    tree.nodes_.push_back({});
    const double n = static_cast<double>(idx.size());
    double pos = 0.0;
    for (size_t r : idx) pos += y[static_cast<Eigen::Index>(r)];
    tree.nodes_[node_id].value = n > 0.0 ? pos / n : 0.0;

    const bool pure = pos == 0.0 || pos == n;
    if (pure || idx.size() < min_samples_split ||
        (max_depth >= 0 && depth >= max_depth)) {
      return node_id;
    }

    std::vector<size_t> features(d);
    for (size_t f = 0; f < d; ++f) features[f] = f;
    if (subsample) features = rng.Permutation(d);

    double best_impurity = std::numeric_limits<double>::infinity();
    int best_feature = -1;
    double best_threshold = 0.0;
    size_t informative = 0;
    for (size_t f : features) {
      if (subsample && informative >= max_features) break;
      column.clear();
      for (size_t r : idx) {
        column.emplace_back(x(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(f)),
                            y[static_cast<Eigen::Index>(r)]);
      }
      std::sort(column.begin(), column.end(),
                [](const auto& a, const auto& b) { return a.first < b.first; });
      if (column.front().first == column.back().first) continue;
      ++informative;
      double left_pos = 0.0;
      for (size_t i = 0; i + 1 < column.size(); ++i) {
        left_pos += column[i].second;
        if (column[i].first == column[i + 1].first) continue;
        const double nl = static_cast<double>(i + 1);
        const double nr = n - nl;
        const double impurity =
            (nl * Gini(left_pos, nl) + nr * Gini(pos - left_pos, nr)) / n;
        if (impurity < best_impurity) {
          best_impurity = impurity;
          best_feature = static_cast<int>(f);
          best_threshold = 0.5 * (column[i].first + column[i + 1].first);
          // Midpoints can round onto the upper value for adjacent doubles.
          if (best_threshold >= column[i + 1].first) best_threshold = column[i].first;
        }
      }
    }
    if (best_feature < 0) return node_id;

    std::vector<size_t> left;
    std::vector<size_t> right;
    for (size_t r : idx) {
      const double v = x(static_cast<Eigen::Index>(r), best_feature);
      (v <= best_threshold ? left : right).push_back(r);
    }
    idx.clear();
    idx.shrink_to_fit();
    const int l = self(self, std::move(left), depth + 1);
    const int rgt = self(self, std::move(right), depth + 1);
    Node& node = tree.nodes_[node_id];
    node.feature = best_feature;
    node.threshold = best_threshold;
    node.left = l;
    node.right = rgt;
    return node_id;
  };
  if (rows.empty()) throw ConfigError("decision tree needs at least one row");
  build(build, rows, 0);
  return tree;
}

double DecisionTree::Score(const double* row) const {
  int i = 0;
  while (nodes_[i].feature >= 0) {
    i = row[nodes_[i].feature] <= nodes_[i].threshold ? nodes_[i].left
                                                      : nodes_[i].right;
  }
  return nodes_[i].value;
}

int DecisionTree::Depth() const {
  std::vector<int> depth(nodes_.size(), 0);
  int best = 0;
  for (size_t i = 0; i < nodes_.size(); ++i) {
    best = std::max(best, depth[i]);
    if (nodes_[i].feature >= 0) {
      depth[nodes_[i].left] = depth[i] + 1;
      depth[nodes_[i].right] = depth[i] + 1;
    }
  }
  return best;
}

TrainedClassifier TrainedClassifier::FromTrees(std::vector<DecisionTree> trees,
                                               size_t num_features) {
  if (trees.empty()) throw ConfigError("forest needs at least one tree");
  TrainedClassifier c;
  c.kind_ = ClassifierKind::kRandomForest;
  c.num_features_ = num_features;
  c.trees_ = std::move(trees);
  return c;
}

Vector TrainedClassifier::PredictScores(const Matrix& x) const {
  if (static_cast<size_t>(x.cols()) != num_features_) {
    throw ConfigError("classifier expects " + std::to_string(num_features_) +
                      " features, got " + std::to_string(x.cols()));
  }
  const Eigen::Index n = x.rows();
  Vector scores(n);
  if (degenerate_) {
    scores.setConstant(constant_);
    return scores;
  }
  switch (kind_) {
    case ClassifierKind::kLogReg:
      for (Eigen::Index i = 0; i < n; ++i) {
        scores[i] = Sigmoid(x.row(i).dot(logreg_.weights.transpose()) +
                            logreg_.intercept);
      }
      break;
    case ClassifierKind::kGaussianNb:
      for (Eigen::Index i = 0; i < n; ++i) {
        double ll[2];
        for (int c = 0; c < 2; ++c) {
          double s = nb_log_prior_[c];
          for (Eigen::Index j = 0; j < x.cols(); ++j) {
            const double v = nb_vars_(c, j);
            const double diff = x(i, j) - nb_means_(c, j);
            s -= 0.5 * std::log(2.0 * std::numbers::pi * v) +
                 diff * diff / (2.0 * v);
          }
          ll[c] = s;
        }
        scores[i] = Sigmoid(ll[1] - ll[0]);
      }
      break;
    case ClassifierKind::kDecisionTree:
    case ClassifierKind::kRandomForest:
      for (Eigen::Index i = 0; i < n; ++i) {
        double s = 0.0;
        for (const DecisionTree& t : trees_) s += t.Score(x.row(i).data());
        scores[i] = s / static_cast<double>(trees_.size());
      }
      break;
    case ClassifierKind::kMlp:
      scores = mlp_->Predict(x).col(0);
      break;
  }
  return scores;
}

TrainedClassifier FitClassifier(ClassifierKind kind, const Matrix& x,
                                const Vector& y,
                                const ClassifierOptions& options,
                                uint64_t seed) {
  CheckInputs(x, y);
  TrainedClassifier c;
  c.kind_ = kind;
  c.num_features_ = static_cast<size_t>(x.cols());
  const Eigen::Index n = x.rows();
  const Eigen::Index d = x.cols();
  const double pos = y.sum();
  if (pos == 0.0 || pos == static_cast<double>(n)) {
    c.degenerate_ = true;
    c.constant_ = pos == 0.0 ? 0.0 : 1.0;
    return c;
  }

  switch (kind) {
    case ClassifierKind::kLogReg:
      c.logreg_ = FitLogisticRegression(x, y, options.logreg_c,
                                        options.logreg_max_steps,
                                        options.logreg_tol);
      break;

    case ClassifierKind::kGaussianNb: {
      c.nb_means_ = Matrix::Zero(2, d);
      c.nb_vars_ = Matrix::Zero(2, d);
      double counts[2] = {0.0, 0.0};
      for (Eigen::Index i = 0; i < n; ++i) {
        const int cls = y[i] > 0.5 ? 1 : 0;
        counts[cls] += 1.0;
        c.nb_means_.row(cls) += x.row(i);
      }
      for (int k = 0; k < 2; ++k) c.nb_means_.row(k) /= counts[k];
      for (Eigen::Index i = 0; i < n; ++i) {
        const int cls = y[i] > 0.5 ? 1 : 0;
        c.nb_vars_.row(cls).array() +=
            (x.row(i) - c.nb_means_.row(cls)).array().square();
      }
      for (int k = 0; k < 2; ++k) c.nb_vars_.row(k) /= counts[k];
      const RowVector mean = x.colwise().mean();
      const double max_var =
          (x.rowwise() - mean).array().square().colwise().mean().maxCoeff();
      // Guards against zero variance when every feature is constant.
      const double smoothing =
          options.nb_var_smoothing * std::max(max_var, 1e-300) + 1e-300;
      c.nb_vars_.array() += smoothing;
      for (int k = 0; k < 2; ++k) {
        c.nb_log_prior_[k] = std::log(counts[k] / static_cast<double>(n));
      }
      break;
    }

    case ClassifierKind::kDecisionTree: {
      Rng rng(seed);
      std::vector<size_t> rows(static_cast<size_t>(n));
      for (size_t i = 0; i < rows.size(); ++i) rows[i] = i;
      c.trees_.push_back(DecisionTree::Fit(x, y, rows, options.tree_max_depth,
                                           options.min_samples_split, 0, rng));
      break;
    }

    case ClassifierKind::kRandomForest: {
      const size_t num_trees = std::max<size_t>(1, options.forest_trees);
      size_t mtry = options.forest_max_features;
      if (mtry == 0) {
        mtry = std::max<size_t>(
            1, static_cast<size_t>(std::lround(std::sqrt(static_cast<double>(d)))));
      }
      std::vector<std::optional<DecisionTree>> trees(num_trees);
      auto fit_tree = [&](size_t t) {
        Rng rng(DeriveSeed(seed, {t}));
        std::vector<size_t> rows(static_cast<size_t>(n));
        for (size_t& r : rows) r = rng.UniformInt(static_cast<uint64_t>(n));
        trees[t] = DecisionTree::Fit(x, y, rows, options.forest_max_depth,
                                     options.min_samples_split, mtry, rng);
      };
      const size_t workers =
          std::clamp<size_t>(static_cast<size_t>(std::max(1, options.workers)), 1,
                             num_trees);
      if (workers == 1) {
        for (size_t t = 0; t < num_trees; ++t) fit_tree(t);
      } else {
        std::atomic<size_t> next{0};
        std::vector<std::thread> pool;
        for (size_t w = 0; w < workers; ++w) {
          pool.emplace_back([&] {
            for (size_t t = next++; t < num_trees; t = next++) fit_tree(t);
          });
        }
        for (auto& th : pool) th.join();
      }
      for (auto& t : trees) c.trees_.push_back(std::move(*t));
      break;
    }

    case ClassifierKind::kMlp: {
      Rng rng(seed);
      std::vector<size_t> widths = {static_cast<size_t>(d)};
      for (size_t h : options.mlp_hidden) widths.push_back(h);
      widths.push_back(1);
      Mlp net = Mlp::Create(widths, HiddenActivation::kRelu,
                            OutputActivation::kSigmoid, rng);
      OptimizerSettings settings;
      settings.kind = OptimizerKind::kAdam;
      settings.learning_rate = options.mlp_learning_rate;
      Optimizer opt(settings);
      const size_t batch =
          std::min<size_t>(std::max<size_t>(1, options.mlp_batch), static_cast<size_t>(n));
      for (int epoch = 0; epoch < options.mlp_epochs; ++epoch) {
        const std::vector<size_t> order = rng.Permutation(static_cast<size_t>(n));
        for (size_t start = 0; start < order.size(); start += batch) {
          const size_t end = std::min(order.size(), start + batch);
          Matrix xb(static_cast<Eigen::Index>(end - start), d);
          Vector yb(static_cast<Eigen::Index>(end - start));
          for (size_t i = start; i < end; ++i) {
            xb.row(static_cast<Eigen::Index>(i - start)) =
                x.row(static_cast<Eigen::Index>(order[i]));
            yb[static_cast<Eigen::Index>(i - start)] =
                y[static_cast<Eigen::Index>(order[i])];
          }
          auto [out, cache] = net.Forward(xb);
          BceResult loss = BceLoss(out.col(0), yb);
          Gradients g = net.Backward(cache, loss.grad);
          opt.Step(net, g);
        }
      }
      c.mlp_ = std::make_shared<const Mlp>(std::move(net));
      break;
    }
  }
  return c;
}

const char* ToString(ClassifierKind kind) {
  switch (kind) {
    case ClassifierKind::kLogReg:
      return "logreg";
    case ClassifierKind::kGaussianNb:
      return "gaussian_nb";
    case ClassifierKind::kDecisionTree:
      return "decision_tree";
    case ClassifierKind::kRandomForest:
      return "random_forest";
    case ClassifierKind::kMlp:
      return "mlp";
  }
  return "?";
}

ClassifierKind ClassifierKindFromString(const std::string& name) {
  for (ClassifierKind k : AllClassifierKinds()) {
    if (name == ToString(k)) return k;
  }
  throw ConfigError("unknown classifier '" + name +
                    "' (valid: logreg, gaussian_nb, decision_tree, "
                    "random_forest, mlp)");
}

const std::vector<ClassifierKind>& AllClassifierKinds() {
  static const std::vector<ClassifierKind> kinds = {
      ClassifierKind::kLogReg, ClassifierKind::kGaussianNb,
      ClassifierKind::kDecisionTree, ClassifierKind::kRandomForest,
      ClassifierKind::kMlp};
  return kinds;
}

}  // namespace pategan
