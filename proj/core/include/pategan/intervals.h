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

// Binomial upper bounds for attack error rates.

#ifndef PATEGAN_INTERVALS_H_
#define PATEGAN_INTERVALS_H_

#include <cstdint>
#include <string>

namespace pategan {

enum class IntervalMethod { kClopperPearson, kBayesian };

// Two-sided Clopper-Pearson upper limit at `confidence`: the
// 1 - (1 - confidence) / 2 quantile of Beta(errors + 1, trials - errors).
// errors == trials gives 1. Throws ConfigError on invalid counts.
double CpUpper(int64_t errors, int64_t trials, double confidence);

// One-sided credible upper limit: the `credibility` quantile of the posterior
// Beta(errors + 1, trials - errors + 1) under a uniform prior. trials may be 0.
double BayesUpper(int64_t errors, int64_t trials, double credibility);

double UpperBound(IntervalMethod method, int64_t errors, int64_t trials,
                  double level);

const char* ToString(IntervalMethod m);
IntervalMethod IntervalMethodFromString(const std::string& s);

}  // namespace pategan

#endif  // PATEGAN_INTERVALS_H_
