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

#ifndef PATEGAN_METRICS_H_
#define PATEGAN_METRICS_H_

#include "pategan/matrix.h"

namespace pategan {

struct MetricValue {
  double value = 0.0;
  // Set when the metric is undefined for the labels (then value is 0.5 for
  // AUROC).
  bool degenerate = false;
};

// Probability that a random positive outscores a random negative, ties
// counting one half. Labels are 0/1.
MetricValue Auroc(const Vector& labels, const Vector& scores);

// Average precision: sum over distinct-score thresholds (descending) of
// (recall increase) x precision. Throws DataError without positives.
double Auprc(const Vector& labels, const Vector& scores);

}  // namespace pategan

#endif  // PATEGAN_METRICS_H_
