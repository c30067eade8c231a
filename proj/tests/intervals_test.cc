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

#include <cmath>

#include <gtest/gtest.h>

#include "pategan/errors.h"
#include "stat_oracles.h"

namespace pategan {
namespace {

using testing::BetaQuantileByBisection;

TEST(CpUpper, ClosedForms) {
  EXPECT_NEAR(CpUpper(0, 1, 0.95), 0.975, 1e-12);
  EXPECT_NEAR(CpUpper(0, 400, 0.95), 1.0 - std::pow(0.025, 1.0 / 400.0), 1e-12);
  EXPECT_NEAR(CpUpper(0, 400, 0.95), 0.009180, 1e-6);
  EXPECT_EQ(CpUpper(7, 7, 0.95), 1.0);
  EXPECT_THROW(CpUpper(3, 2, 0.95), ConfigError);
  EXPECT_THROW(CpUpper(0, 0, 0.95), ConfigError);
  EXPECT_THROW(CpUpper(0, 5, 1.0), ConfigError);
}

TEST(BayesUpper, ClosedForms) {
  EXPECT_NEAR(BayesUpper(0, 0, 0.95), 0.95, 1e-12);
  EXPECT_NEAR(BayesUpper(0, 400, 0.95), 1.0 - std::pow(0.05, 1.0 / 401.0), 1e-12);
  EXPECT_NEAR(BayesUpper(0, 400, 0.95), 0.007443, 1e-6);
}

TEST(Bounds, MatchBetaQuantileOracleOnGrid) {
  for (int64_t trials : {1, 10, 100, 400}) {
    for (int64_t e = 0; e <= trials; ++e) {
      const double cp = e == trials ? 1.0
                                    : BetaQuantileByBisection(e + 1.0, static_cast<double>(trials - e), 0.975);
      EXPECT_NEAR(CpUpper(e, trials, 0.95), cp, 1e-9) << e << "/" << trials;
      const double by = BetaQuantileByBisection(e + 1.0, trials - e + 1.0, 0.95);
      EXPECT_NEAR(BayesUpper(e, trials, 0.95), by, 1e-9) << e << "/" << trials;
      EXPECT_GE(CpUpper(e, trials, 0.95), static_cast<double>(e) / static_cast<double>(trials));
    }
    EXPECT_LT(BayesUpper(0, trials, 0.95), CpUpper(0, trials, 0.95));
  }
}

TEST(UpperBound, Dispatch) {
  EXPECT_EQ(UpperBound(IntervalMethod::kClopperPearson, 3, 40, 0.95), CpUpper(3, 40, 0.95));
  EXPECT_EQ(UpperBound(IntervalMethod::kBayesian, 3, 40, 0.95), BayesUpper(3, 40, 0.95));
  EXPECT_EQ(IntervalMethodFromString("bayesian"), IntervalMethod::kBayesian);
  EXPECT_THROW(IntervalMethodFromString("wald"), ConfigError);
}

}  // namespace
}  // namespace pategan
