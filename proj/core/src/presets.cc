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

#include <algorithm>
#include <cmath>

#include "pategan/errors.h"
#include "pategan/pategan.h"

namespace pategan {
namespace {

size_t AtLeastOne(size_t v) { return std::max<size_t>(1, v); }

// Integer fraction num/den of d, never below 1.
size_t Frac(size_t d, size_t num, size_t den) { return AtLeastOne(d * num / den); }

size_t TeachersPerThousand(size_t n) { return AtLeastOne(n / 1000); }

double DeltaNRootN(size_t n) {
  const double dn = static_cast<double>(std::max<size_t>(n, 2));
  return 1.0 / (dn * std::sqrt(dn));
}

}  // namespace

const std::vector<std::string> kPresetNames = {
    "faithful", "original", "updated", "synthcity",
    "turing",   "borealis", "smartnoise"};

PresetBundle PresetConfig(const std::string& name, size_t d, size_t n) {
  if (d < 1) throw ConfigError("preset needs at least one column");
  PateGanConfig c;
  FaultProfile f;
  // Shared defaults: delta 1e-5, Adam at 1e-4, batch 64, 10,000 iterations.
  c.delta = 1e-5;
  c.optimizer = OptimizerKind::kAdam;
  c.learning_rate = 1e-4;
  c.batch_size = 64;
  c.max_iters = 10000;
  c.lambda = 1e-3;
  c.num_moments = 100;

  if (name == "faithful") {
    c.num_teachers = TeachersPerThousand(n);
    c.teacher_iters = 5;
    c.student_iters = 5;
    c.generator_iters = 1;
    c.teacher_hidden = {};
    c.student_hidden = {d, d};
    c.noise_dim = Frac(d, 1, 4);
    c.generator_hidden = {d, Frac(d, 1, 2)};
  } else if (name == "original") {
    f.pate_enabled = false;
    f.noise_convention = NoiseConvention::kGaussian;
    f.delta_scale_fault = DeltaScaleFault::kXorPower;
    f.label_conditioning = true;
    f.bounds_from_data = true;
    f.budget_precheck = false;
    c.batch_size = 128;
    c.student_iters = 1;
    c.generator_iters = 1;
    c.student_hidden = {d, d};
    c.noise_dim = Frac(d, 1, 4);
    c.generator_hidden = {d, d};
  } else if (name == "updated") {
    f.partition_mode = PartitionMode::kAllLast;
    f.teacher_model = TeacherModel::kLogReg;
    f.noise_convention = NoiseConvention::kLapLambda;
    f.bounds_from_data = true;
    f.budget_precheck = false;
    c.num_teachers = 10;
    c.lambda = 1.0;
    c.num_moments = 20;
    c.optimizer = OptimizerKind::kRmsProp;
    c.teacher_iters = 1;
    c.student_iters = 5;
    c.generator_iters = 1;
    c.student_hidden = {d};
    c.noise_dim = d;
    c.generator_hidden = {4 * d, 4 * d};
  } else if (name == "synthcity") {
    f.partition_mode = PartitionMode::kResampleAll;
    f.teacher_model = TeacherModel::kLogReg;
    f.accountant_fault = AccountantFault::kIndexShift;
    f.bounds_from_data = true;
    f.budget_precheck = false;
    c.num_teachers = 10;
    c.delta = DeltaNRootN(n);
    c.batch_size = 200;
    c.max_iters = 1000;
    c.teacher_iters = 1;
    c.student_iters = 10;
    c.generator_iters = 10;
    c.student_hidden = {100};
    c.noise_dim = d;
    c.generator_hidden = {100};
  } else if (name == "turing") {
    f.pate_enabled = false;
    f.noise_convention = NoiseConvention::kGaussian;
    f.delta_scale_fault = DeltaScaleFault::kMultDiv;
    f.budget_precheck = false;
    c.batch_size = 128;
    c.max_iters = 100;
    c.student_iters = 1;
    c.generator_iters = 1;
    c.student_hidden = {d, d};
    c.noise_dim = Frac(d, 1, 4);
    c.generator_hidden = {d, d};
  } else if (name == "borealis") {
    f.accountant_fault = AccountantFault::kMissingLog;
    f.bounds_from_data = true;
    f.budget_precheck = false;
    c.num_teachers = 10;
    c.lambda = 1e-4;
    c.teacher_iters = 5;
    c.student_iters = 5;
    c.generator_iters = 1;
    c.teacher_hidden = {Frac(d, 1, 2)};
    c.student_hidden = {Frac(d, 1, 2)};
    c.noise_dim = Frac(d, 1, 4);
    c.generator_hidden = {2 * d};
  } else if (name == "smartnoise") {
    f.accountant_fault = AccountantFault::kMissingLog;
    f.budget_precheck = false;
    c.num_teachers = TeachersPerThousand(n);
    c.delta = DeltaNRootN(n);
    c.teacher_iters = 5;
    c.student_iters = 5;
    c.generator_iters = 1;
    c.teacher_hidden = {Frac(d, 2, 3), Frac(d, 1, 3)};
    c.student_hidden = {Frac(d, 2, 3), Frac(d, 1, 3)};
    c.noise_dim = 64;
    c.generator_hidden = {64, 64};
  } else {
    std::string valid;
    for (const auto& p : kPresetNames) valid += (valid.empty() ? "" : ", ") + p;
    throw ConfigError("unknown preset '" + name + "' (valid presets: " + valid + ")");
  }
  return {c, f};
}

}  // namespace pategan
