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

#include "pategan/serialization.h"

#include <cmath>
#include <fstream>
#include <limits>

#include "pategan/errors.h"

namespace pategan {
namespace {

using nlohmann::json;

json NullableDouble(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

double DoubleOrNan(const json& j) {
  return j.is_null() ? std::numeric_limits<double>::quiet_NaN() : j.get<double>();
}

}  // namespace

json ConfigToJson(const PateGanConfig& c) {
  return {{"epsilon_budget", c.epsilon_budget},
          {"delta", c.delta},
          {"lambda", c.lambda},
          {"num_moments", c.num_moments},
          {"accountant_mode", ToString(c.accountant_mode)},
          {"accountant_granularity", ToString(c.accountant_granularity)},
          {"num_teachers", c.num_teachers},
          {"teacher_iters", c.teacher_iters},
          {"student_iters", c.student_iters},
          {"generator_iters", c.generator_iters},
          {"batch_size", c.batch_size},
          {"max_iters", c.max_iters},
          {"noise_dim", c.noise_dim},
          {"generator_hidden", c.generator_hidden},
          {"teacher_hidden", c.teacher_hidden},
          {"student_hidden", c.student_hidden},
          {"optimizer", ToString(c.optimizer)},
          {"learning_rate", c.learning_rate},
          {"generator_loss", ToString(c.generator_loss)},
          {"clip_norm", c.clip_norm},
          {"trace", c.trace},
          {"seed", c.seed}};
}

PateGanConfig ConfigFromJson(const json& j) {
  try {
    PateGanConfig c;
    c.epsilon_budget = j.at("epsilon_budget").get<double>();
    c.delta = j.at("delta").get<double>();
    c.lambda = j.at("lambda").get<double>();
    c.num_moments = j.at("num_moments").get<int>();
    c.accountant_mode = AccountantModeFromString(j.at("accountant_mode"));
    c.accountant_granularity =
        UpdateGranularityFromString(j.at("accountant_granularity"));
    c.num_teachers = j.at("num_teachers").get<size_t>();
    c.teacher_iters = j.at("teacher_iters").get<int>();
    c.student_iters = j.at("student_iters").get<int>();
    c.generator_iters = j.at("generator_iters").get<int>();
    c.batch_size = j.at("batch_size").get<size_t>();
    c.max_iters = j.at("max_iters").get<int64_t>();
    c.noise_dim = j.at("noise_dim").get<size_t>();
    c.generator_hidden = j.at("generator_hidden").get<std::vector<size_t>>();
    c.teacher_hidden = j.at("teacher_hidden").get<std::vector<size_t>>();
    c.student_hidden = j.at("student_hidden").get<std::vector<size_t>>();
    c.optimizer = OptimizerKindFromString(j.at("optimizer"));
    c.learning_rate = j.at("learning_rate").get<double>();
    c.generator_loss = GeneratorLossFromString(j.at("generator_loss"));
    c.clip_norm = j.at("clip_norm").get<double>();
    c.trace = j.at("trace").get<bool>();
    c.seed = j.at("seed").get<uint64_t>();
    return c;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
}

json FaultProfileToJson(const FaultProfile& f) {
  return {{"pate_enabled", f.pate_enabled},
          {"partition_mode", ToString(f.partition_mode)},
          {"teacher_model", ToString(f.teacher_model)},
          {"noise_convention", ToString(f.noise_convention)},
          {"accountant_fault", ToString(f.accountant_fault)},
          {"delta_scale_fault", ToString(f.delta_scale_fault)},
          {"label_conditioning", f.label_conditioning},
          {"bounds_from_data", f.bounds_from_data},
          {"budget_precheck", f.budget_precheck},
          {"faithful", f.IsFaithful()}};
}

FaultProfile FaultProfileFromJson(const json& j) {
  try {
    FaultProfile f;
    f.pate_enabled = j.at("pate_enabled").get<bool>();
    f.partition_mode = PartitionModeFromString(j.at("partition_mode"));
    f.teacher_model = TeacherModelFromString(j.at("teacher_model"));
    f.noise_convention = NoiseConventionFromString(j.at("noise_convention"));
    f.accountant_fault = AccountantFaultFromString(j.at("accountant_fault"));
    f.delta_scale_fault = DeltaScaleFaultFromString(j.at("delta_scale_fault"));
    f.label_conditioning = j.at("label_conditioning").get<bool>();
    f.bounds_from_data = j.at("bounds_from_data").get<bool>();
    f.budget_precheck = j.at("budget_precheck").get<bool>();
    return f;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed fault profile: ") + e.what());
  }
}

json ModelToJson(const PateGanModel& m) {
  json teachers = json::array();
  for (const Mlp& t : m.teachers) teachers.push_back(t.ToJson());
  json j = {{"format", "pategan-model"},
            {"version", 1},
            {"config", ConfigToJson(m.config)},
            {"fault_profile", FaultProfileToJson(m.profile)},
            {"scaling_meta", m.scaling_meta.ToJson()},
            {"label_rate", m.label_rate},
            {"generator", m.generator.ToJson()},
            {"teachers", teachers},
            {"student", m.student.ToJson()},
            {"alpha", m.alpha},
            {"accountant_updates", m.accountant_updates},
            {"q_violations", m.q_violations},
            {"epsilon_hat", m.epsilon_hat},
            {"epsilon_is_data_dependent", m.profile.pate_enabled},
            {"iterations", m.iterations},
            {"status", ToString(m.status)}};
  if (m.bounds_warning) j["bounds_warning"] = json::parse(*m.bounds_warning);
  return j;
}

PateGanModel ModelFromJson(const json& j) {
  try {
    if (j.at("format") != "pategan-model" || j.at("version") != 1) {
      throw ConfigError("unsupported model format");
    }
    std::vector<Mlp> teachers;
    for (const auto& t : j.at("teachers")) teachers.push_back(Mlp::FromJson(t));
    std::optional<std::string> warning;
    if (j.contains("bounds_warning")) warning = j.at("bounds_warning").dump();
    return PateGanModel{
        .config = ConfigFromJson(j.at("config")),
        .profile = FaultProfileFromJson(j.at("fault_profile")),
        .scaling_meta = Metadata::FromJson(j.at("scaling_meta")),
        .label_rate = j.at("label_rate").get<double>(),
        .generator = Mlp::FromJson(j.at("generator")),
        .teachers = std::move(teachers),
        .student = Mlp::FromJson(j.at("student")),
        .alpha = j.at("alpha").get<std::vector<double>>(),
        .accountant_updates = j.at("accountant_updates").get<int64_t>(),
        .q_violations = j.at("q_violations").get<int64_t>(),
        .epsilon_hat = j.at("epsilon_hat").get<double>(),
        .iterations = j.at("iterations").get<int64_t>(),
        .status = TrainingStatusFromString(j.at("status")),
        .bounds_warning = warning,
        .trace = std::nullopt};
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed model: ") + e.what());
  }
}

void SaveModel(const PateGanModel& m, const std::string& path,
               const json& extra) {
  json j = ModelToJson(m);
  for (auto it = extra.begin(); it != extra.end(); ++it) j[it.key()] = it.value();
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write model file '" + path + "'");
  out << j.dump() << '\n';
  if (!out) throw DataError("failed writing model file '" + path + "'");
}

PateGanModel LoadModel(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open model file '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw DataError("model file '" + path + "' is not valid JSON: " + e.what());
  }
  return ModelFromJson(j);
}

json TraceRecordToJson(const TraceRecord& r) {
  json tallies = json::array();
  for (const VoteTally& t : r.tallies) tallies.push_back({t.n0, t.n1});
  return {{"iter", r.iter},
          {"complete", r.complete},
          {"teachers_seen", r.teachers_seen},
          {"teachers_seen_digest", r.teachers_seen_digest},
          {"teacher1_ce", NullableDouble(r.teacher1_ce)},
          {"others_ce", NullableDouble(r.others_ce)},
          {"alpha", r.alpha},
          {"epsilon_hat", r.epsilon_hat},
          {"tallies", tallies}};
}

TraceRecord TraceRecordFromJson(const json& j) {
  TraceRecord r;
  r.iter = j.at("iter").get<int64_t>();
  r.complete = j.at("complete").get<bool>();
  r.teachers_seen = j.at("teachers_seen").get<std::vector<size_t>>();
  r.teachers_seen_digest = j.at("teachers_seen_digest").get<std::vector<uint64_t>>();
  r.teacher1_ce = DoubleOrNan(j.at("teacher1_ce"));
  r.others_ce = DoubleOrNan(j.at("others_ce"));
  r.alpha = j.at("alpha").get<std::vector<double>>();
  r.epsilon_hat = j.at("epsilon_hat").get<double>();
  for (const auto& t : j.at("tallies")) {
    r.tallies.push_back({t.at(0).get<int64_t>(), t.at(1).get<int64_t>()});
  }
  return r;
}

void WriteTraceJsonl(const TrainingTrace& t, std::ostream& out,
                     const json& header) {
  if (!header.is_null()) out << header.dump() << '\n';
  for (const TraceRecord& r : t.records) out << TraceRecordToJson(r).dump() << '\n';
}

}  // namespace pategan
