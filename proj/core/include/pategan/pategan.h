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

// PATE-GAN training: a generator, k teacher discriminators on data
// partitions and a student discriminator trained on noisy teacher votes.
// Fault profiles reproduce the behavior of several public implementations.

#ifndef PATEGAN_PATEGAN_H_
#define PATEGAN_PATEGAN_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "pategan/data_io.h"
#include "pategan/dp_mech.h"
#include "pategan/matrix.h"
#include "pategan/nn.h"
#include "pategan/rng.h"

namespace pategan {

enum class TeacherModel { kMlp, kLogReg };
enum class DeltaScaleFault { kNone, kXorPower, kMultDiv };
// kPerBatch: one accountant update per student step, charged with the
// batch's smallest vote margin. kPerSample: one update per generated sample.
enum class UpdateGranularity { kPerBatch, kPerSample };
// kNonSaturating minimizes -log S(G(z)); kLiteral minimizes log(1 - S(G(z))).
enum class GeneratorLoss { kNonSaturating, kLiteral };

struct FaultProfile {
  bool pate_enabled = true;
  PartitionMode partition_mode = PartitionMode::kDisjoint;
  TeacherModel teacher_model = TeacherModel::kMlp;
  NoiseConvention noise_convention = NoiseConvention::kLapInvLambda;
  AccountantFault accountant_fault = AccountantFault::kNone;
  DeltaScaleFault delta_scale_fault = DeltaScaleFault::kNone;
  bool label_conditioning = false;
  // Scale with min/max read off the training data instead of public bounds.
  bool bounds_from_data = false;
  // Stop before a student step whose queries would push the accountant past
  // the budget. Without it the loop checks once per iteration.
  bool budget_precheck = true;

  bool IsFaithful() const;
  bool operator==(const FaultProfile&) const = default;
};

struct PateGanConfig {
  double epsilon_budget = 1.0;
  double delta = 1e-5;
  double lambda = 1e-3;
  int num_moments = 100;
  AccountantMode accountant_mode = AccountantMode::kPategan;
  UpdateGranularity accountant_granularity = UpdateGranularity::kPerBatch;

  size_t num_teachers = 1;
  int teacher_iters = 5;
  int student_iters = 5;
  int generator_iters = 1;
  size_t batch_size = 64;
  int64_t max_iters = 10000;

  size_t noise_dim = 1;
  // Hidden widths only; output widths are d (generator) and 1 (the rest).
  std::vector<size_t> generator_hidden;
  std::vector<size_t> teacher_hidden;
  std::vector<size_t> student_hidden;

  OptimizerKind optimizer = OptimizerKind::kAdam;
  double learning_rate = 1e-4;
  GeneratorLoss generator_loss = GeneratorLoss::kNonSaturating;
  // Gradient clip norm for the single-discriminator (non-PATE) path.
  double clip_norm = 1.0;

  bool trace = false;
  uint64_t seed = 0;

  // Throws ConfigError. d = columns, n = training records.
  void Validate(size_t d, size_t n) const;
};

enum class TrainingStatus {
  kMaxIters,               // ran max_iters iterations
  kBudgetReached,          // the accountant reached the budget
  kBudgetExhaustedAtStart  // the very first student step would exceed it
};

struct TraceRecord {
  int64_t iter = 0;
  // False for an iteration cut short by the budget check.
  bool complete = true;
  std::vector<size_t> teachers_seen;        // cumulative distinct records
  std::vector<uint64_t> teachers_seen_digest;  // hash of each seen-set
  double teacher1_ce = 0.0;  // teacher 1 on its first-seen subset
  double others_ce = 0.0;    // mean of the other teachers on that subset
  std::vector<double> alpha;
  double epsilon_hat = 0.0;
  std::vector<VoteTally> tallies;  // accountant inputs, in order
};

struct TrainingTrace {
  std::vector<TraceRecord> records;
};

struct PateGanModel {
  PateGanConfig config;
  FaultProfile profile;
  // Bounds used for scaling; Generate inverse-scales with them.
  Metadata scaling_meta;
  // Fraction of positive labels in the training data (label conditioning).
  double label_rate = 0.0;

  Mlp generator;
  std::vector<Mlp> teachers;
  // Student, or the single discriminator when PATE is disabled.
  Mlp student;

  std::vector<double> alpha;
  int64_t accountant_updates = 0;
  int64_t q_violations = 0;
  // Reported privacy spend: the accountant's estimate, 0 when no query was
  // answered, and the nominal budget when PATE is disabled.
  double epsilon_hat = 0.0;
  int64_t iterations = 0;
  TrainingStatus status = TrainingStatus::kMaxIters;
  std::optional<std::string> bounds_warning;

  std::optional<TrainingTrace> trace;
};

// Trains on `data` in its raw units; scaling to [0, 1] happens inside using
// the profile's bounds policy. Throws ConfigError / TrainingError.
PateGanModel Train(const Dataset& data, const PateGanConfig& cfg,
                   const FaultProfile& profile);

// n_prime synthetic records in raw units.
Dataset Generate(const PateGanModel& model, size_t n_prime, Rng& rng);

// Returns the trace of a model trained with cfg.trace = true.
const TrainingTrace& TraceTraining(const PateGanModel& model);

// Loss gradient for one generator step. Only the generator and the student
// enter the computation.
Gradients GeneratorGradients(const Mlp& generator, const Mlp& student,
                             const Matrix& z, GeneratorLoss loss);

// Per-coordinate standard deviation multiplier sqrt(2 ln(1.25/delta))/eps of
// the Gaussian mechanism, with the preset's arithmetic fault applied.
double GaussianNoiseMultiplier(double epsilon, double delta,
                               DeltaScaleFault fault);

extern const std::vector<std::string> kPresetNames;

struct PresetBundle {
  PateGanConfig config;
  FaultProfile profile;
};

// Hyperparameters and fault profile of a named preset for d columns and N
// training records. Throws ConfigError listing valid names.
PresetBundle PresetConfig(const std::string& name, size_t d, size_t n);

const char* ToString(TeacherModel m);
const char* ToString(DeltaScaleFault f);
const char* ToString(UpdateGranularity g);
const char* ToString(GeneratorLoss g);
const char* ToString(TrainingStatus s);
TeacherModel TeacherModelFromString(const std::string& s);
DeltaScaleFault DeltaScaleFaultFromString(const std::string& s);
UpdateGranularity UpdateGranularityFromString(const std::string& s);
GeneratorLoss GeneratorLossFromString(const std::string& s);
TrainingStatus TrainingStatusFromString(const std::string& s);

}  // namespace pategan

#endif  // PATEGAN_PATEGAN_H_
