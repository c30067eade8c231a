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

#include "pategan/metrics.h"

#include <algorithm>
#include <numeric>
#include <vector>

#include "pategan/errors.h"

namespace pategan {
namespace {

// Indices sorted by descending score (stable, so equal scores keep order).
std::vector<Eigen::Index> OrderDescending(const Vector& scores) {
  std::vector<Eigen::Index> order(static_cast<size_t>(scores.size()));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    return scores[a] > scores[b];
  });
  return order;
}

void CheckLengths(const Vector& labels, const Vector& scores) {
  if (labels.size() != scores.size()) {
    throw ConfigError("labels and scores differ in length");
  }
  if (!scores.allFinite()) throw DataError("non-finite score");
}

}  // namespace

MetricValue Auroc(const Vector& labels, const Vector& scores) {
  CheckLengths(labels, scores);
  const std::vector<Eigen::Index> order = OrderDescending(scores);
  double pos_total = 0.0;
  double neg_total = 0.0;
  for (Eigen::Index i = 0; i < labels.size(); ++i) {
    (labels[i] > 0.5 ? pos_total : neg_total) += 1.0;
  }
  if (pos_total == 0.0 || neg_total == 0.0) return {0.5, true};

  // Walk groups of tied scores from the top; each positive beats every
  // negative below its group and ties half of the negatives inside it.
  double wins = 0.0;
  double neg_seen = 0.0;
  size_t i = 0;
  while (i < order.size()) {
    size_t j = i;
    double pos_group = 0.0;
    double neg_group = 0.0;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) {
      (labels[order[j]] > 0.5 ? pos_group : neg_group) += 1.0;
      ++j;
    }
    wins += pos_group * ((neg_total - neg_seen - neg_group) + 0.5 * neg_group);
    neg_seen += neg_group;
    i = j;
  }
  return {wins / (pos_total * neg_total), false};
}

double Auprc(const Vector& labels, const Vector& scores) {
  CheckLengths(labels, scores);
  double pos_total = 0.0;
  for (Eigen::Index i = 0; i < labels.size(); ++i) {
    if (labels[i] > 0.5) pos_total += 1.0;
  }
  if (pos_total == 0.0) throw DataError("AUPRC needs at least one positive label");

  const std::vector<Eigen::Index> order = OrderDescending(scores);
  double ap = 0.0;
  double tp = 0.0;
  double fp = 0.0;
  double prev_recall = 0.0;
  size_t i = 0;
  while (i < order.size()) {
    size_t j = i;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) {
      (labels[order[j]] > 0.5 ? tp : fp) += 1.0;
      ++j;
    }
    const double recall = tp / pos_total;
    ap += (recall - prev_recall) * (tp / (tp + fp));
    prev_recall = recall;
    i = j;
  }
  return ap;
}

}  // namespace pategan
