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

// Black-box privacy auditing through membership distinguishing games.
//
// Each game trains a fresh generator on D (with the target) or D' (without
// it), featurizes the synthetic output and labels it with the world bit. A
// random forest learns to tell the worlds apart; its test error rates are
// upper-bounded and converted into an empirical lower bound on epsilon.

#ifndef PATEGAN_AUDIT_H_
#define PATEGAN_AUDIT_H_

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "pategan/classifiers.h"
#include "pategan/data_io.h"
#include "pategan/intervals.h"
#include "pategan/matrix.h"
#include "pategan/pategan.h"

namespace pategan {

enum class AttackKind { kQueryBased, kGroundHog };
enum class GeneratorKind { kPateGan, kVerbatim, kNoiseOnly };

// Per column, in metadata order: min, max, mean, median, population std.
std::vector<double> FeaturizeNaive(const Dataset& synthetic);

// Every record of {0,1}^d in lexicographic order (first column most
// significant). Throws DataError unless every column is binary.
std::vector<RowVector> BinaryDomain(const Metadata& meta);

// Exact-match count of each domain record in the synthetic data.
std::vector<double> FeaturizeQueries(const Dataset& synthetic,
                                     const std::vector<RowVector>& domain);

struct AuditConfig {
  AttackKind attack = AttackKind::kQueryBased;
  GeneratorKind generator = GeneratorKind::kPateGan;
  std::string preset = "faithful";  // label carried into the report
  PateGanConfig model_config;
  FaultProfile profile;

  // Games per world and their train/validation/test split (per world).
  size_t games_per_world = 1000;
  size_t train_games = 400;
  size_t val_games = 200;
  size_t test_games = 400;

  IntervalMethod interval = IntervalMethod::kClopperPearson;
  double confidence = 0.95;
  // Rows of synthetic data released per game.
  size_t synthetic_size = 100;
  uint64_t seed = 0;
  int workers = 1;
  int max_attempts = 3;
  ClassifierOptions attack_classifier;

  // delta used in the eps_emp conversion (the audited model's delta).
  double delta() const { return model_config.delta; }
  void Validate() const;
};

struct GameTranscript {
  // World-major: all without-target games (world 0), then all with-target
  // games (world 1), each in game-index order.
  Matrix features;
  std::vector<int> world;
  size_t games_per_world = 0;
  int64_t retried_games = 0;
};

// Plays 2 * games_per_world games. The target is appended to data for the
// with-target world when absent; when present, D' drops one copy of it.
GameTranscript RunGames(const AuditConfig& cfg, const Dataset& data,
                        const RowVector& target);

// Synthetic output of one game (exposed for tests).
Dataset PlayGame(const AuditConfig& cfg, const Dataset& training,
                 uint64_t game_seed);

struct RatePair {
  double alpha = 0.0;  // false-positive rate (without-target called "with")
  double beta = 0.0;   // false-negative rate
  double alpha_upper = 1.0;
  double beta_upper = 1.0;
  int64_t fp = 0;
  int64_t fn = 0;
  int64_t n_pos = 0;  // with-target test games
  int64_t n_neg = 0;  // without-target test games
  double threshold = 0.0;
  bool degenerate = false;  // single-class training portion
};

// Fits the attack forest on the training split, tunes the decision threshold
// on validation (maximizing plug-in eps_emp with rates floored at 0.5/n,
// ties broken by Youden's J) and counts errors on the test split.
RatePair FitAndEvaluate(const GameTranscript& transcript,
                        const AuditConfig& cfg);

// max{ln((1 - a - delta)/b), ln((1 - b - delta)/a), 0}. Throws ConfigError
// when a bound is not in (0, 1].
double EpsEmp(double alpha_upper, double beta_upper, double delta);

struct AuditReport {
  AuditConfig config;
  RatePair rates;
  double eps_emp = 0.0;
  bool violation = false;
  int64_t retried_games = 0;

  nlohmann::json ToJson() const;
};

AuditReport AuditPipeline(const AuditConfig& cfg, const Dataset& data,
                          const RowVector& target);

struct TargetSelection {
  size_t index = 0;  // row of data
  double auc = 0.0;
  std::vector<size_t> candidates;
  std::vector<double> candidate_auc;
};

// Mini membership attacks (naive featurizer) on the `num_candidates` records
// farthest from the column means after min-max scaling; returns the one with
// the highest attack AUC. Each mini attack plays games_per_world games per world and holds out test_fraction
// of them (per world) for the AUC.
TargetSelection SelectTarget(const AuditConfig& cfg, const Dataset& data,
                             size_t num_candidates, size_t games_per_world,
                             double test_fraction);

const char* ToString(AttackKind a);
const char* ToString(GeneratorKind g);
AttackKind AttackKindFromString(const std::string& s);
GeneratorKind GeneratorKindFromString(const std::string& s);

}  // namespace pategan

#endif  // PATEGAN_AUDIT_H_
