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

#include "pategan/pategan.h"

#include <cmath>
#include <type_traits>

#include <gtest/gtest.h>

#include "pategan/errors.h"
#include "pategan/serialization.h"
#include "test_util.h"

namespace pategan {
namespace {

using testing::RandomDataset;

PateGanConfig SmallConfig(size_t d, size_t teachers) {
  PateGanConfig c;
  c.num_teachers = teachers;
  c.batch_size = 16;
  c.max_iters = 30;
  c.noise_dim = 2;
  c.generator_hidden = {d};
  c.student_hidden = {d};
  c.teacher_iters = 2;
  c.student_iters = 2;
  c.learning_rate = 1e-3;
  c.seed = 3;
  return c;
}

TEST(Train, FaithfulRespectsBudget) {
  const Dataset data = RandomDataset(200, 3, 1);
  PateGanConfig c = SmallConfig(4, 4);
  c.epsilon_budget = 1.0;
  c.max_iters = 100000;
  const PateGanModel m = Train(data, c, FaultProfile{});
  EXPECT_LE(m.epsilon_hat, 1.0);
  EXPECT_EQ(m.status, TrainingStatus::kBudgetReached);
  EXPECT_GT(m.accountant_updates, 0);
}

TEST(Train, IterationCap) {
  const Dataset data = RandomDataset(100, 3, 2);
  PateGanConfig c = SmallConfig(4, 2);
  c.epsilon_budget = 1e9;
  c.max_iters = 10;
  const PateGanModel m = Train(data, c, FaultProfile{});
  EXPECT_EQ(m.iterations, 10);
  EXPECT_EQ(m.status, TrainingStatus::kMaxIters);
}

TEST(Train, BudgetExhaustedAtStart) {
  const Dataset data = RandomDataset(100, 3, 2);
  PateGanConfig c = SmallConfig(4, 2);
  c.epsilon_budget = 0.01;  // below ln(1/delta)/L
  const PateGanModel m = Train(data, c, FaultProfile{});
  EXPECT_EQ(m.status, TrainingStatus::kBudgetExhaustedAtStart);
  EXPECT_EQ(m.iterations, 0);
  EXPECT_EQ(m.epsilon_hat, 0.0);
  Rng rng(1);
  EXPECT_EQ(Generate(m, 3, rng).num_rows(), 3u);
}

TEST(Train, Deterministic) {
  const Dataset data = RandomDataset(120, 3, 4);
  PateGanConfig c = SmallConfig(4, 3);
  c.trace = true;
  const std::string a = ModelToJson(Train(data, c, FaultProfile{})).dump();
  const std::string b = ModelToJson(Train(data, c, FaultProfile{})).dump();
  EXPECT_EQ(a, b);
  c.seed = 4;
  EXPECT_NE(a, ModelToJson(Train(data, c, FaultProfile{})).dump());
}

TEST(Train, ConfigErrors) {
  const Dataset data = RandomDataset(10, 2, 5);
  PateGanConfig c = SmallConfig(3, 11);
  EXPECT_THROW(Train(data, c, FaultProfile{}), ConfigError);
  c = SmallConfig(3, 2);
  c.epsilon_budget = 0.0;
  EXPECT_THROW(Train(data, c, FaultProfile{}), ConfigError);
  c = SmallConfig(3, 2);
  c.batch_size = 0;
  EXPECT_THROW(Train(data, c, FaultProfile{}), ConfigError);
}

TEST(Train, ShapesInvariant) {
  const Dataset data = RandomDataset(60, 3, 6);
  PateGanConfig c = SmallConfig(4, 3);
  c.max_iters = 3;
  const PateGanModel m = Train(data, c, FaultProfile{});
  EXPECT_EQ(m.generator.input_width(), c.noise_dim);
  EXPECT_EQ(m.generator.output_width(), 4u);
  EXPECT_EQ(m.student.input_width(), 4u);
  ASSERT_EQ(m.teachers.size(), 3u);
  for (const Mlp& t : m.teachers) EXPECT_EQ(t.input_width(), 4u);
}

TEST(Train, TraceReplayReproducesEpsilon) {
  const Dataset data = RandomDataset(150, 3, 7);
  PateGanConfig c = SmallConfig(4, 5);
  c.trace = true;
  c.max_iters = 40;
  const PateGanModel m = Train(data, c, FaultProfile{});
  AccountantSettings s{c.lambda, c.num_moments, c.delta, c.accountant_mode, AccountantFault::kNone};
  MomentsAccountant replay(s);
  for (const TraceRecord& r : TraceTraining(m).records) {
    replay.Update(r.tallies);
    EXPECT_EQ(replay.alpha(), r.alpha);
  }
  EXPECT_EQ(replay.alpha(), m.alpha);
  EXPECT_EQ(replay.Epsilon(), m.epsilon_hat);
}

TEST(Train, BorealisOverestimatesOnReplay) {
  const Dataset data = RandomDataset(150, 3, 8);
  PateGanConfig c = SmallConfig(4, 5);
  c.trace = true;
  const PateGanModel m = Train(data, c, FaultProfile{});
  const PresetBundle borealis = PresetConfig("borealis", 4, 150);
  AccountantSettings base{c.lambda, c.num_moments, c.delta, AccountantMode::kPategan, AccountantFault::kNone};
  AccountantSettings faulty = base;
  faulty.fault = borealis.profile.accountant_fault;
  MomentsAccountant a(base), b(faulty);
  for (const TraceRecord& r : TraceTraining(m).records) {
    a.Update(r.tallies);
    b.Update(r.tallies);
    EXPECT_GE(b.Epsilon(), a.Epsilon());
  }
}

TEST(Trace, RequiresTracing) {
  const Dataset data = RandomDataset(50, 2, 9);
  PateGanConfig c = SmallConfig(3, 2);
  c.max_iters = 2;
  const PateGanModel m = Train(data, c, FaultProfile{});
  EXPECT_THROW(TraceTraining(m), ConfigError);
}

TEST(Trace, PartitionSemantics) {
  const Dataset data = RandomDataset(100, 2, 10);
  PateGanConfig c = SmallConfig(3, 5);
  c.trace = true;
  c.epsilon_budget = 1e9;
  c.max_iters = 40;
  FaultProfile faithful;
  const PateGanModel mf = Train(data, c, faithful);
  for (const TraceRecord& r : TraceTraining(mf).records) {
    for (size_t s : r.teachers_seen) EXPECT_LE(s, 20u);
  }
  FaultProfile all_last;
  all_last.partition_mode = PartitionMode::kAllLast;
  const PateGanModel ma = Train(data, c, all_last);
  for (const TraceRecord& r : TraceTraining(ma).records) {
    for (size_t t = 1; t < 5; ++t) {
      EXPECT_EQ(r.teachers_seen_digest[t], r.teachers_seen_digest[0]);
      EXPECT_EQ(r.teachers_seen[t], r.teachers_seen[0]);
    }
  }
  FaultProfile resample;
  resample.partition_mode = PartitionMode::kResampleAll;
  const PateGanModel mr = Train(data, c, resample);
  const TrainingTrace& t = TraceTraining(mr);
  for (size_t s : t.records.back().teachers_seen) EXPECT_EQ(s, 100u);
}

TEST(GeneratorStep, OnlyReadsGeneratorAndStudent) {
  using Fn = Gradients (*)(const Mlp&, const Mlp&, const Matrix&, GeneratorLoss);
  static_assert(std::is_same_v<decltype(&GeneratorGradients), Fn>);
  Rng rng(11);
  const Mlp g = Mlp::Create({2, 3, 3}, HiddenActivation::kRelu, OutputActivation::kSigmoid, rng);
  const Mlp s = Mlp::Create({3, 3, 1}, HiddenActivation::kRelu, OutputActivation::kSigmoid, rng);
  Matrix z(4, 2);
  for (Eigen::Index i = 0; i < z.size(); ++i) z.data()[i] = rng.Normal();
  const Gradients gr = GeneratorGradients(g, s, z, GeneratorLoss::kNonSaturating);
  ASSERT_EQ(gr.weights.size(), g.num_layers());
  // Finite-difference check of one generator weight.
  auto loss = [&](const Mlp& gen) {
    const Matrix p = s.Predict(gen.Predict(z));
    return -(p.array().log()).mean();
  };
  Mlp probe = g;
  double& w = probe.MutableParameters()[0]->data()[1];
  const double saved = w;
  w = saved + 1e-6;
  const double up = loss(probe);
  w = saved - 1e-6;
  const double down = loss(probe);
  EXPECT_NEAR(gr.weights[0].data()[1], (up - down) / 2e-6, 1e-6);
}

TEST(Generate, ShapeAndBinaryColumns) {
  const Dataset data = RandomDataset(80, 2, 12);
  PateGanConfig c = SmallConfig(3, 2);
  c.max_iters = 5;
  const PateGanModel m = Train(data, c, FaultProfile{});
  Rng rng(1);
  const Dataset s = Generate(m, 5, rng);
  EXPECT_EQ(s.num_rows(), 5u);
  EXPECT_EQ(s.num_cols(), 3u);
  for (Eigen::Index i = 0; i < 5; ++i) {
    const double y = s.rows()(i, 2);
    EXPECT_TRUE(y == 0.0 || y == 1.0);
    EXPECT_GE(s.rows()(i, 0), -2.0);
    EXPECT_LE(s.rows()(i, 0), 3.0);
  }
  EXPECT_THROW(Generate(m, 0, rng), ConfigError);
}

TEST(Generate, LabelConditioningMatchesCounts) {
  Dataset data = RandomDataset(400, 2, 13);
  Matrix rows = data.rows();
  for (Eigen::Index i = 0; i < rows.rows(); ++i) rows(i, 2) = i % 25 == 0 ? 1.0 : 0.0;
  data = data.WithRows(rows);
  PresetBundle b = PresetConfig("original", 3, 400);
  b.config.max_iters = 5;
  const PateGanModel m = Train(data, b.config, b.profile);
  Rng rng(2);
  const Dataset s = Generate(m, 400, rng);
  EXPECT_EQ(s.rows().col(2).sum(), 16.0);
}

TEST(Presets, Profiles) {
  const PresetBundle f = PresetConfig("faithful", 12, 5000);
  EXPECT_TRUE(f.profile.IsFaithful());
  EXPECT_EQ(f.config.num_teachers, 5u);
  EXPECT_EQ(f.profile.noise_convention, NoiseConvention::kLapInvLambda);

  const PresetBundle u = PresetConfig("updated", 12, 5000);
  EXPECT_EQ(u.profile.partition_mode, PartitionMode::kAllLast);
  EXPECT_EQ(u.profile.noise_convention, NoiseConvention::kLapLambda);
  EXPECT_EQ(u.profile.teacher_model, TeacherModel::kLogReg);
  EXPECT_EQ(u.config.optimizer, OptimizerKind::kRmsProp);

  const PresetBundle t = PresetConfig("turing", 12, 5000);
  EXPECT_FALSE(t.profile.pate_enabled);
  EXPECT_EQ(t.profile.delta_scale_fault, DeltaScaleFault::kMultDiv);

  const PresetBundle o = PresetConfig("original", 12, 5000);
  EXPECT_FALSE(o.profile.pate_enabled);
  EXPECT_EQ(o.profile.noise_convention, NoiseConvention::kGaussian);
  EXPECT_EQ(o.profile.delta_scale_fault, DeltaScaleFault::kXorPower);
  EXPECT_TRUE(o.profile.label_conditioning);

  const PresetBundle s = PresetConfig("smartnoise", 12, 5000);
  EXPECT_EQ(s.config.num_teachers, 5u);
  EXPECT_EQ(s.config.lambda, 1e-3);
  EXPECT_EQ(s.config.teacher_hidden, (std::vector<size_t>{8, 4}));
  EXPECT_EQ(s.config.noise_dim, 64u);
  EXPECT_EQ(s.profile.accountant_fault, AccountantFault::kMissingLog);

  EXPECT_EQ(PresetConfig("synthcity", 12, 5000).profile.accountant_fault, AccountantFault::kIndexShift);
  EXPECT_EQ(PresetConfig("borealis", 12, 5000).profile.accountant_fault, AccountantFault::kMissingLog);

  for (const std::string& name : kPresetNames) {
    if (name != "faithful") EXPECT_FALSE(PresetConfig(name, 12, 5000).profile.IsFaithful()) << name;
  }
  try {
    PresetConfig("bogus", 3, 10);
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("smartnoise"), std::string::npos);
  }
}

TEST(GaussianNoise, FaultArithmetic) {
  const double clean = GaussianNoiseMultiplier(1.0, 1e-5, DeltaScaleFault::kNone);
  EXPECT_NEAR(clean, std::sqrt(2.0 * std::log(1.25e5)), 1e-12);
  // 10 XOR 5 = 15, so the effective delta is 1/15.
  EXPECT_NEAR(GaussianNoiseMultiplier(1.0, 1e-5, DeltaScaleFault::kXorPower),
              std::sqrt(2.0 * std::log(1.25 * 15.0)), 1e-12);
  EXPECT_EQ(GaussianNoiseMultiplier(1.0, 1e-5, DeltaScaleFault::kMultDiv), 0.0);
  EXPECT_LT(GaussianNoiseMultiplier(1.0, 1e-5, DeltaScaleFault::kXorPower), clean);
}

TEST(NonPate, RunsToCap) {
  const Dataset data = RandomDataset(100, 2, 14);
  PresetBundle b = PresetConfig("turing", 3, 100);
  b.config.max_iters = 7;
  const PateGanModel m = Train(data, b.config, b.profile);
  EXPECT_EQ(m.iterations, 7);
  EXPECT_TRUE(m.teachers.empty());
  EXPECT_EQ(m.epsilon_hat, b.config.epsilon_budget);
}

TEST(LogRegTeachers, UpdatedPresetTrains) {
  const Dataset data = RandomDataset(100, 2, 15);
  PresetBundle b = PresetConfig("updated", 3, 100);
  b.config.max_iters = 4;
  b.config.trace = true;
  const PateGanModel m = Train(data, b.config, b.profile);
  EXPECT_TRUE(m.bounds_warning.has_value());
  const TrainingTrace& t = TraceTraining(m);
  ASSERT_FALSE(t.records.empty());
  // All teachers are fitted on the same records.
  EXPECT_DOUBLE_EQ(t.records.back().teacher1_ce, t.records.back().others_ce);
}

}  // namespace
}  // namespace pategan
