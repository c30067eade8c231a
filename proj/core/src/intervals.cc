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

#include "pategan/intervals.h"

#include <boost/math/special_functions/beta.hpp>

#include "pategan/errors.h"

namespace pategan {
namespace {

void CheckCounts(int64_t errors, int64_t trials, double level, bool allow_empty) {
  if (trials < (allow_empty ? 0 : 1) || errors < 0 || errors > trials) {
    throw ConfigError("invalid error/trial counts " + std::to_string(errors) +
                      "/" + std::to_string(trials));
  }
  if (!(level > 0.0 && level < 1.0)) {
    throw ConfigError("confidence level must lie in (0, 1)");
  }
}

}  // namespace

double CpUpper(int64_t errors, int64_t trials, double confidence) {
  CheckCounts(errors, trials, confidence, false);
  if (errors == trials) return 1.0;
  const double p = 1.0 - (1.0 - confidence) / 2.0;
  return boost::math::ibeta_inv(static_cast<double>(errors + 1),
                                static_cast<double>(trials - errors), p);
}

double BayesUpper(int64_t errors, int64_t trials, double credibility) {
  CheckCounts(errors, trials, credibility, true);
  return boost::math::ibeta_inv(static_cast<double>(errors + 1),
                                static_cast<double>(trials - errors + 1),
                                credibility);
}

double UpperBound(IntervalMethod method, int64_t errors, int64_t trials,
                  double level) {
  return method == IntervalMethod::kClopperPearson
             ? CpUpper(errors, trials, level)
             : BayesUpper(errors, trials, level);
}

const char* ToString(IntervalMethod m) {
  return m == IntervalMethod::kClopperPearson ? "clopper_pearson" : "bayesian";
}

IntervalMethod IntervalMethodFromString(const std::string& s) {
  if (s == "clopper_pearson") return IntervalMethod::kClopperPearson;
  if (s == "bayesian") return IntervalMethod::kBayesian;
  throw ConfigError("unknown interval method '" + s +
                    "' (valid: clopper_pearson, bayesian)");
}

}  // namespace pategan
