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

// Downstream utility of synthetic data: train classifiers on real (setting A)
// or synthetic (setting B) data and score them on held-out real data.

#ifndef PATEGAN_BENCH_H_
#define PATEGAN_BENCH_H_

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "pategan/classifiers.h"
#include "pategan/data_io.h"
#include "pategan/pategan.h"

namespace pategan {

enum class Setting { kA, kB };

struct SettingScores {
  double auroc = 0.5;
  double auprc = 0.0;
  bool degenerate_fit = false;    // training labels had one class
  bool degenerate_auroc = false;  // test labels had one class
};

// Labels are the label column coded 0/1 (values > 0.5 are positive).
// Features are used as given, so callers scale them beforehand.
SettingScores RunSetting(Setting setting, const Dataset& train_real,
                         const Dataset& test_real, const Dataset* synthetic,
                         ClassifierKind kind, const ClassifierOptions& options,
                         uint64_t seed);

struct BenchConfig {
  std::vector<ClassifierKind> classifiers = {ClassifierKind::kLogReg};
  size_t n_models = 5;
  size_t n_synth_per_model = 5;
  std::vector<double> epsilons = {1.0};
  std::string preset = "faithful";
  PateGanConfig model_config;
  FaultProfile profile;
  double train_fraction = 0.8;
  // Rows per synthetic dataset; 0 means the size of the real training split.
  size_t synthetic_size = 0;
  uint64_t seed = 0;
  int workers = 1;
  ClassifierOptions classifier_options;

  void Validate() const;
};

struct RunScore {
  size_t model = 0;
  size_t synth = 0;
  SettingScores scores;
};

struct BenchCell {
  ClassifierKind classifier = ClassifierKind::kLogReg;
  double epsilon = 1.0;
  SettingScores setting_a;
  std::vector<RunScore> runs;
  double best_auroc = 0.0;
  double best_auprc = 0.0;
  double mean_auroc = 0.0;
  double se_auroc = 0.0;
  double mean_auprc = 0.0;
  double se_auprc = 0.0;
};

struct BenchReport {
  BenchConfig config;
  std::vector<BenchCell> cells;  // classifier-major, then epsilon
  std::vector<double> epsilon_hat;  // per epsilon, per model (flattened)
  nlohmann::json ToJson() const;
};

// Splits data (train_fraction), trains n_models generators per epsilon and
// evaluates every classifier on n_synth_per_model synthetic sets of each.
// Classifier features are min-max scaled with public bounds when the
// metadata has them, otherwise with bounds fitted on the training split
// (test and synthetic data are clamped into them).
BenchReport RunBenchmark(const BenchConfig& cfg, const Dataset& data);

// Mean and standard error (sample standard deviation / sqrt(n); 0 for n=1).
std::pair<double, double> MeanAndStandardError(const std::vector<double>& v);

// One row per classifier; columns: setting A, then setting-B best AUROC for
// each (report, epsilon).
void WriteBenchTableCsv(const std::vector<BenchReport>& reports,
                        std::ostream& out);

// Small in-repo datasets with public bounds: "separable" (two Gaussian
// blobs, 2 features), "imbalanced" (4 features, about 10% positives) and
// "binary3" (three binary columns, label = x0 OR x1 with 5% flips).
Dataset DeskDataset(const std::string& name, size_t n, uint64_t seed);
extern const std::vector<std::string> kDeskDatasets;

}  // namespace pategan

#endif  // PATEGAN_BENCH_H_
