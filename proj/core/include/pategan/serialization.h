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

// JSON forms of engine configuration, trained models and training traces.
//
// A model file is one JSON object:
//   {"format": "pategan-model", "version": 1, "config": {...},
//    "fault_profile": {...}, "scaling_meta": {...}, "generator": <mlp>,
//    "teachers": [<mlp>...], "student": <mlp>, "alpha": [...], ...}
// where <mlp> is the network layout of Mlp::ToJson (row-major parameters).
// Doubles are written with round-trip precision.

#ifndef PATEGAN_SERIALIZATION_H_
#define PATEGAN_SERIALIZATION_H_

#include <ostream>
#include <string>

#include <nlohmann/json.hpp>

#include "pategan/pategan.h"

namespace pategan {

nlohmann::json ConfigToJson(const PateGanConfig& c);
PateGanConfig ConfigFromJson(const nlohmann::json& j);

nlohmann::json FaultProfileToJson(const FaultProfile& f);
FaultProfile FaultProfileFromJson(const nlohmann::json& j);

nlohmann::json ModelToJson(const PateGanModel& m);
PateGanModel ModelFromJson(const nlohmann::json& j);

void SaveModel(const PateGanModel& m, const std::string& path,
               const nlohmann::json& extra = nlohmann::json::object());
PateGanModel LoadModel(const std::string& path);

// {"iter", "complete", "teachers_seen", "teachers_seen_digest",
//  "teacher1_ce", "others_ce", "alpha", "epsilon_hat", "tallies"}
nlohmann::json TraceRecordToJson(const TraceRecord& r);
TraceRecord TraceRecordFromJson(const nlohmann::json& j);
void WriteTraceJsonl(const TrainingTrace& t, std::ostream& out,
                     const nlohmann::json& header = nullptr);

}  // namespace pategan

#endif  // PATEGAN_SERIALIZATION_H_
