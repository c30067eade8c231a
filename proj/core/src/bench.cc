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

#include "pategan/bench.h"

#include <algorithm>
#include <cmath>
#include <memory>
#include <optional>

#include "pategan/errors.h"
#include "pategan/metrics.h"
#include "pategan/serialization.h"
#include "parallel.h"

namespace pategan {
namespace {

enum : uint64_t {
  kSplitTag = 0x5b117,
  kSettingATag = 0xa,
  kModelTag = 0x30de1,
  kSynthTag = 0x5e7,
  kFitTag = 0xf17,
};

Vector BinaryLabels(const Dataset& ds) {
  return (ds.Labels().array() > 0.5).cast<double>().matrix();
}

SettingScores Score(const TrainedClassifier& model, const Dataset& test) {
  const Vector y = BinaryLabels(test);
  const Vector s = model.PredictScores(test.Features());
  SettingScores out;
  const MetricValue auc = Auroc(y, s);
  out.auroc = auc.value;
  out.degenerate_auroc = auc.degenerate;
  out.auprc = y.sum() > 0.0 ? Auprc(y, s) : 0.0;
  out.degenerate_fit = model.degenerate();
  return out;
}

Dataset MakeDataset(Matrix rows, std::vector<ColumnSpec> cols) {
  auto meta = std::make_shared<Metadata>();
  meta->columns = std::move(cols);
  meta->label_index = meta->columns.size() - 1;
  meta->bounds_provenance = BoundsProvenance::kPublic;
  meta->Validate();
  return Dataset(std::move(rows), meta);
}

ColumnSpec Num(const std::string& name, double lo, double hi) {
  return {name, ColumnKind::kNumerical, lo, hi};
}

ColumnSpec Bin(const std::string& name) { return {name, ColumnKind::kBinary, 0.0, 1.0}; }

}  // namespace

const std::vector<std::string> kDeskDatasets = {"separable", "imbalanced", "binary3"};

SettingScores RunSetting(Setting setting, const Dataset& train_real,
                         const Dataset& test_real, const Dataset* synthetic,
                         ClassifierKind kind, const ClassifierOptions& options,
                         uint64_t seed) {
  if (setting == Setting::kB && synthetic == nullptr) {
    throw ConfigError("setting B needs synthetic training data");
  }
  const Dataset& train = setting == Setting::kA ? train_real : *synthetic;
  if (train.num_cols() != test_real.num_cols()) {
    throw ConfigError("training and test data differ in width");
  }
  const TrainedClassifier model =
      FitClassifier(kind, train.Features(), BinaryLabels(train), options, seed);
  return Score(model, test_real);
}

void BenchConfig::Validate() const {
  if (classifiers.empty()) throw ConfigError("no classifiers selected");
  if (n_models < 1 || n_synth_per_model < 1) {
    throw ConfigError("n_models and n_synth_per_model must be at least 1");
  }
  if (epsilons.empty()) throw ConfigError("empty epsilon grid");
  for (double e : epsilons) {
    if (!(e > 0.0)) throw ConfigError("epsilon grid values must be positive");
  }
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw ConfigError("train fraction must lie in (0, 1)");
  }
}

std::pair<double, double> MeanAndStandardError(const std::vector<double>& v) {
  if (v.empty()) return {0.0, 0.0};
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  if (v.size() == 1) return {mean, 0.0};
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  const double sd = std::sqrt(ss / static_cast<double>(v.size() - 1));
  return {mean, sd / std::sqrt(static_cast<double>(v.size()))};
}

BenchReport RunBenchmark(const BenchConfig& cfg, const Dataset& data) {
  cfg.Validate();
  auto [train, test] =
      SplitTrainTest(data, cfg.train_fraction, DeriveSeed(cfg.seed, {kSplitTag}));

  std::shared_ptr<const Metadata> scaler = data.meta_ptr();
  if (data.meta().bounds_provenance != BoundsProvenance::kPublic) {
    scaler = std::make_shared<const Metadata>(FitEmpiricalBounds(train).meta);
  }
  auto scale = [&](const Dataset& ds) {
    return ScaleMinMax(ClampToBounds(ds.WithMeta(scaler)), ScaleDirection::kForward);
  };
  const Dataset train_scaled = scale(train);
  const Dataset test_scaled = scale(test);
  const size_t n_prime =
      cfg.synthetic_size > 0 ? cfg.synthetic_size : train.num_rows();

  const size_t n_eps = cfg.epsilons.size();
  const size_t n_kinds = cfg.classifiers.size();
  const size_t runs_per_eps = cfg.n_models * cfg.n_synth_per_model;

  // scores[e][m][s][c]
  std::vector<SettingScores> scores(n_eps * runs_per_eps * n_kinds);
  std::vector<double> eps_hat(n_eps * cfg.n_models, 0.0);
  auto slot = [&](size_t e, size_t m, size_t s, size_t c) {
    return ((e * cfg.n_models + m) * cfg.n_synth_per_model + s) * n_kinds + c;
  };

  internal::ParallelFor(n_eps * cfg.n_models, cfg.workers, [&](size_t job) {
    const size_t e = job / cfg.n_models;
    const size_t m = job % cfg.n_models;
    PateGanConfig mc = cfg.model_config;
    mc.epsilon_budget = cfg.epsilons[e];
    mc.seed = DeriveSeed(cfg.seed, {kModelTag, e, m});
    mc.trace = false;
    const PateGanModel model = Train(train, mc, cfg.profile);
    eps_hat[job] = model.epsilon_hat;
    for (size_t s = 0; s < cfg.n_synth_per_model; ++s) {
      Rng rng(DeriveSeed(cfg.seed, {kSynthTag, e, m, s}));
      const Dataset synthetic = scale(Generate(model, n_prime, rng));
      for (size_t c = 0; c < n_kinds; ++c) {
        scores[slot(e, m, s, c)] =
            RunSetting(Setting::kB, train_scaled, test_scaled, &synthetic,
                       cfg.classifiers[c], cfg.classifier_options,
                       DeriveSeed(cfg.seed, {kFitTag, e, m, s, c}));
      }
    }
  });

  BenchReport report;
  report.config = cfg;
  report.epsilon_hat = eps_hat;
  for (size_t c = 0; c < n_kinds; ++c) {
    const SettingScores a =
        RunSetting(Setting::kA, train_scaled, test_scaled, nullptr,
                   cfg.classifiers[c], cfg.classifier_options,
                   DeriveSeed(cfg.seed, {kSettingATag, c}));
    for (size_t e = 0; e < n_eps; ++e) {
      BenchCell cell;
      cell.classifier = cfg.classifiers[c];
      cell.epsilon = cfg.epsilons[e];
      cell.setting_a = a;
      std::vector<double> aurocs;
      std::vector<double> auprcs;
      for (size_t m = 0; m < cfg.n_models; ++m) {
        for (size_t s = 0; s < cfg.n_synth_per_model; ++s) {
          const SettingScores& sc = scores[slot(e, m, s, c)];
          cell.runs.push_back({m, s, sc});
          aurocs.push_back(sc.auroc);
          auprcs.push_back(sc.auprc);
        }
      }
      cell.best_auroc = *std::max_element(aurocs.begin(), aurocs.end());
      cell.best_auprc = *std::max_element(auprcs.begin(), auprcs.end());
      std::tie(cell.mean_auroc, cell.se_auroc) = MeanAndStandardError(aurocs);
      std::tie(cell.mean_auprc, cell.se_auprc) = MeanAndStandardError(auprcs);
      report.cells.push_back(std::move(cell));
    }
  }
  return report;
}

nlohmann::json BenchReport::ToJson() const {
  using nlohmann::json;
  auto scores_json = [](const SettingScores& s) {
    return json{{"auroc", s.auroc},
                {"auprc", s.auprc},
                {"degenerate_fit", s.degenerate_fit},
                {"degenerate_auroc", s.degenerate_auroc}};
  };
  json rows = json::array();
  for (const BenchCell& c : cells) {
    json runs = json::array();
    for (const RunScore& r : c.runs) {
      json j = scores_json(r.scores);
      j["model"] = r.model;
      j["synth"] = r.synth;
      runs.push_back(j);
    }
    rows.push_back({{"classifier", ToString(c.classifier)},
                    {"epsilon", c.epsilon},
                    {"setting_a", scores_json(c.setting_a)},
                    {"setting_b",
                     {{"best_auroc", c.best_auroc},
                      {"best_auprc", c.best_auprc},
                      {"mean_auroc", c.mean_auroc},
                      {"se_auroc", c.se_auroc},
                      {"mean_auprc", c.mean_auprc},
                      {"se_auprc", c.se_auprc},
                      {"runs", runs}}}});
  }
  json kinds = json::array();
  for (ClassifierKind k : config.classifiers) kinds.push_back(ToString(k));
  return {{"preset", config.preset},
          {"classifiers", kinds},
          {"epsilons", config.epsilons},
          {"n_models", config.n_models},
          {"n_synth_per_model", config.n_synth_per_model},
          {"train_fraction", config.train_fraction},
          {"synthetic_size", config.synthetic_size},
          {"seed", config.seed},
          {"auprc_convention", "average_precision"},
          {"fault_profile", FaultProfileToJson(config.profile)},
          {"model_config", ConfigToJson(config.model_config)},
          {"epsilon_hat", epsilon_hat},
          {"rows", rows}};
}

void WriteBenchTableCsv(const std::vector<BenchReport>& reports,
                        std::ostream& out) {
  if (reports.empty()) return;
  out << "classifier,real";
  for (const BenchReport& r : reports) {
    for (double e : r.config.epsilons) out << ',' << r.config.preset << "_eps" << e;
  }
  out << '\n';
  for (ClassifierKind k : reports.front().config.classifiers) {
    out << ToString(k);
    bool wrote_a = false;
    for (const BenchReport& r : reports) {
      for (const BenchCell& c : r.cells) {
        if (c.classifier == k && !wrote_a) {
          out << ',' << c.setting_a.auroc;
          wrote_a = true;
        }
      }
    }
    if (!wrote_a) out << ',';
    for (const BenchReport& r : reports) {
      for (double e : r.config.epsilons) {
        out << ',';
        for (const BenchCell& c : r.cells) {
          if (c.classifier == k && c.epsilon == e) out << c.best_auroc;
        }
      }
    }
    out << '\n';
  }
}

Dataset DeskDataset(const std::string& name, size_t n, uint64_t seed) {
  if (n < 2) throw ConfigError("desk dataset needs at least two rows");
  Rng rng(seed);
  if (name == "separable") {
    Matrix rows(static_cast<Eigen::Index>(n), 3);
    for (Eigen::Index i = 0; i < rows.rows(); ++i) {
      const double y = (i % 2 == 0) ? 1.0 : 0.0;
      const double center = y > 0.5 ? 1.5 : -1.5;
      rows(i, 0) = std::clamp(center + 0.5 * rng.Normal(), -5.0, 5.0);
      rows(i, 1) = std::clamp(center + 0.5 * rng.Normal(), -5.0, 5.0);
      rows(i, 2) = y;
    }
    return MakeDataset(std::move(rows),
                       {Num("x0", -5.0, 5.0), Num("x1", -5.0, 5.0), Bin("y")});
  }
  if (name == "imbalanced") {
    Matrix rows(static_cast<Eigen::Index>(n), 5);
    for (Eigen::Index i = 0; i < rows.rows(); ++i) {
      const double y = rng.Uniform() < 0.1 ? 1.0 : 0.0;
      for (Eigen::Index j = 0; j < 4; ++j) {
        const double center = y > 0.5 ? (j % 2 == 0 ? 2.0 : -1.0) : 0.0;
        rows(i, j) = std::clamp(center + rng.Normal(), -6.0, 6.0);
      }
      rows(i, 4) = y;
    }
    return MakeDataset(std::move(rows), {Num("x0", -6.0, 6.0), Num("x1", -6.0, 6.0),
                                         Num("x2", -6.0, 6.0), Num("x3", -6.0, 6.0),
                                         Bin("y")});
  }
  if (name == "binary3") {
    Matrix rows(static_cast<Eigen::Index>(n), 3);
    for (Eigen::Index i = 0; i < rows.rows(); ++i) {
      const double x0 = rng.Uniform() < 0.5 ? 1.0 : 0.0;
      const double x1 = rng.Uniform() < 0.5 ? 1.0 : 0.0;
      double y = (x0 > 0.5 || x1 > 0.5) ? 1.0 : 0.0;
      if (rng.Uniform() < 0.05) y = 1.0 - y;
      rows(i, 0) = x0;
      rows(i, 1) = x1;
      rows(i, 2) = y;
    }
    return MakeDataset(std::move(rows), {Bin("x0"), Bin("x1"), Bin("y")});
  }
  throw ConfigError("unknown desk dataset '" + name +
                    "' (valid: separable, imbalanced, binary3)");
}

}  // namespace pategan
