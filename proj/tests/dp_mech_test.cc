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

#include "pategan/dp_mech.h"

#include <cmath>
#include <sstream>

#include <gtest/gtest.h>

#include "accountant_oracle.h"
#include "pategan/errors.h"

namespace pategan {
namespace {

std::pair<double, double> MeanVar(const std::vector<double>& v) {
  long double s = 0.0L;
  for (double x : v) s += x;
  const long double mean = s / v.size();
  long double ss = 0.0L;
  for (double x : v) ss += (x - mean) * (x - mean);
  return {static_cast<double>(mean), static_cast<double>(ss / v.size())};
}

TEST(Laplace, MomentsAndDeterminism) {
  Rng rng(1);
  std::vector<double> draws(1000000);
  for (double& d : draws) d = LaplaceSample(1.0, rng);
  auto [mean, var] = MeanVar(draws);
  EXPECT_LE(std::abs(mean), 0.01);
  EXPECT_NEAR(var, 2.0, 0.03 * 2.0);

  Rng rng_b(2);
  for (double& d : draws) d = LaplaceSample(2.5, rng_b);
  EXPECT_NEAR(MeanVar(draws).second, 2.0 * 2.5 * 2.5, 0.03 * 2.0 * 2.5 * 2.5);

  Rng a(3);
  Rng b(3);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(LaplaceSample(1.0, a), LaplaceSample(1.0, b));
  EXPECT_THROW(LaplaceSample(0.0, a), ConfigError);
}

TEST(Gaussian, MomentsAndDeterminism) {
  const double sigma = 1.7;
  Rng rng(4);
  std::vector<double> draws(1000000);
  for (double& d : draws) d = GaussianSample(sigma, rng);
  auto [mean, var] = MeanVar(draws);
  EXPECT_LE(std::abs(mean), 4.0 * sigma / 1000.0);
  EXPECT_NEAR(var, sigma * sigma, 0.03 * sigma * sigma);
  Rng a(5);
  Rng b(5);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(GaussianSample(1.0, a), GaussianSample(1.0, b));
  EXPECT_THROW(GaussianSample(-1.0, a), ConfigError);
}

TEST(NoiseScale, Conventions) {
  EXPECT_DOUBLE_EQ(AggregationNoiseScale(NoiseConvention::kLapInvLambda, 0.01), 100.0);
  EXPECT_DOUBLE_EQ(AggregationNoiseScale(NoiseConvention::kLapLambda, 0.01), 0.01);
  EXPECT_DOUBLE_EQ(AggregationNoiseScale(NoiseConvention::kGaussian, 0.01), 100.0);
}

TEST(PateAggregate, NegligibleNoiseIsMajority) {
  Rng rng(6);
  const AggregateResult r = PateAggregate({true, true, false}, 1e6, NoiseConvention::kLapInvLambda, rng);
  EXPECT_EQ(r.label, 1);
  EXPECT_EQ(r.tally, (VoteTally{1, 2}));
  EXPECT_EQ(PateAggregate({false, false, false, false}, 1e6, NoiseConvention::kLapInvLambda, rng).label, 0);
  EXPECT_THROW(PateAggregate(std::vector<bool>{}, 1.0, NoiseConvention::kLapInvLambda, rng), ConfigError);
}

TEST(PateAggregate, MajorityOracleOnRandomVotes) {
  Rng rng(7);
  int checked = 0;
  while (checked < 1000) {
    const size_t k = 1 + rng.UniformInt(50);
    std::vector<bool> votes(k);
    int ones = 0;
    for (size_t i = 0; i < k; ++i) {
      votes[i] = rng.Uniform() < 0.5;
      ones += votes[i];
    }
    if (2 * ones == static_cast<int>(k)) continue;
    const int majority = 2 * ones > static_cast<int>(k) ? 1 : 0;
    EXPECT_EQ(PateAggregate(votes, 1e6, NoiseConvention::kLapInvLambda, rng).label, majority);
    ++checked;
  }
}

TEST(AccountantQ, Examples) {
  EXPECT_DOUBLE_EQ(AccountantQ({3, 3}, 0.7), 0.5);
  EXPECT_NEAR(AccountantQ({0, 2}, 1.0), std::exp(-2.0), 1e-15);
  EXPECT_NEAR(AccountantQ({0, 2}, 1.0), 0.135335, 5e-7);
  EXPECT_NEAR(AccountantQ({4, 2}, 0.001), 2.002 / (4.0 * std::exp(0.002)), 1e-15);
  EXPECT_NEAR(AccountantQ({4, 2}, 0.001), 0.4995000003, 1e-10);
}

TEST(AccountantQ, RangeProperty) {
  Rng rng(8);
  for (int i = 0; i < 10000; ++i) {
    const VoteTally t{static_cast<int64_t>(rng.UniformInt(100)), static_cast<int64_t>(rng.UniformInt(100))};
    if (t.k() == 0) continue;
    const double lambda = std::exp(-10.0 + 12.0 * rng.Uniform());
    const double q = AccountantQ(t, lambda);
    EXPECT_GT(q, 0.0);
    EXPECT_LE(q, 0.5);
  }
}

TEST(QCondition, Threshold) {
  const double lambda = 0.5;
  const double bound = (std::exp(2 * lambda) - 1) / (std::exp(4 * lambda) - 1);
  EXPECT_TRUE(QConditionHolds(bound * 0.999, lambda));
  EXPECT_FALSE(QConditionHolds(bound * 1.001, lambda));
}

TEST(MomentIncrement, HalfQExample) {
  const double inc = MomentIncrement(0.5, 0.001, 1, AccountantMode::kPategan, AccountantFault::kNone);
  EXPECT_NEAR(inc, 4e-6, 1e-18);
  // The log term on its own, from the oracle.
  testing::OracleAccountant o{0.001L, 1, 1e-5L};
  const long double inner = 0.5L * (0.5L / (1.0L - std::exp(0.002L) * 0.5L)) +
                            0.5L * std::exp(0.002L);
  EXPECT_NEAR(static_cast<double>(std::log(inner)), 0.002002, 1e-6);
  EXPECT_NEAR(static_cast<double>(inner), 1.002004, 1e-6);
  EXPECT_NEAR(static_cast<double>(o.Increment(0.5L, 1)), 4e-6, 1e-18);
}

TEST(MomentIncrement, MissingLogDivergesAtLargeL) {
  const double l1 = MomentIncrement(0.5, 0.001, 1, AccountantMode::kPategan, AccountantFault::kMissingLog);
  EXPECT_NEAR(l1, 4e-6, 1e-18);
  // Where the log term wins without the fault, skipping the log changes it.
  const double q = AccountantQ({0, 20}, 1.0);
  const double ok = MomentIncrement(q, 1.0, 3, AccountantMode::kPategan, AccountantFault::kNone);
  const double bad = MomentIncrement(q, 1.0, 3, AccountantMode::kPategan, AccountantFault::kMissingLog);
  EXPECT_LT(ok, 2.0 * 3 * 4);
  EXPECT_GT(bad, ok);
}

TEST(MomentIncrement, StrictNeverLarger) {
  Rng rng(9);
  for (int i = 0; i < 2000; ++i) {
    const double lambda = std::exp(-8.0 + 9.0 * rng.Uniform());
    const double q = AccountantQ({static_cast<int64_t>(rng.UniformInt(30)), 1 + static_cast<int64_t>(rng.UniformInt(30))}, lambda);
    const int l = 1 + static_cast<int>(rng.UniformInt(100));
    EXPECT_LE(MomentIncrement(q, lambda, l, AccountantMode::kPateStrict, AccountantFault::kNone),
              MomentIncrement(q, lambda, l, AccountantMode::kPategan, AccountantFault::kNone));
  }
  EXPECT_THROW(MomentIncrement(0.6, 0.1, 1, AccountantMode::kPategan, AccountantFault::kNone), ConfigError);
}

TEST(AccountantEpsilon, ClosedForms) {
  std::vector<double> zeros(100, 0.0);
  EXPECT_NEAR(AccountantEpsilon(zeros, 1e-5), std::log(1e5) / 100.0, 1e-15);
  EXPECT_NEAR(AccountantEpsilon(zeros, 1e-5), 0.115129, 5e-7);
  std::vector<double> linear(100);
  for (int l = 1; l <= 100; ++l) linear[l - 1] = 0.01 * l;
  EXPECT_NEAR(AccountantEpsilon(linear, 1e-5), 0.01 + std::log(1e5) / 100.0, 1e-15);
  EXPECT_NEAR(AccountantEpsilon(linear, 1e-5), 0.125129, 5e-7);
  std::vector<double> one = {0.0};
  EXPECT_NEAR(AccountantEpsilon(one, std::exp(-1.0)), 1.0, 1e-15);
}

TEST(Accountant, MatchesOracleOnRandomStreams) {
  Rng rng(10);
  const double lambdas[] = {1e-4, 1e-3, 1.0};
  for (int s = 0; s < 300; ++s) {
    AccountantSettings set;
    set.lambda = lambdas[s % 3];
    set.num_moments = 1 + static_cast<int>(rng.UniformInt(100));
    set.delta = 1e-5;
    set.mode = s % 2 ? AccountantMode::kPateStrict : AccountantMode::kPategan;
    set.fault = static_cast<AccountantFault>(rng.UniformInt(3));
    MomentsAccountant acc(set);
    testing::OracleAccountant o{set.lambda, set.num_moments, set.delta};
    o.strict = set.mode == AccountantMode::kPateStrict;
    o.missing_log = set.fault == AccountantFault::kMissingLog;
    o.index_shift = set.fault == AccountantFault::kIndexShift;
    const int len = 1 + static_cast<int>(rng.UniformInt(30));
    for (int t = 0; t < len; ++t) {
      const int64_t k = 1 + static_cast<int64_t>(rng.UniformInt(50));
      const int64_t n1 = static_cast<int64_t>(rng.UniformInt(static_cast<uint64_t>(k) + 1));
      acc.Update({k - n1, n1});
      o.Update(k - n1, n1);
    }
    for (int l = 0; l < set.num_moments; ++l) {
      ASSERT_LE(testing::RelErr(o.alpha[l], acc.alpha()[l]), 1e-9) << "stream " << s << " l " << l + 1;
    }
    ASSERT_LE(testing::RelErr(o.Epsilon(), acc.Epsilon()), 1e-9);
  }
}

TEST(Accountant, MonotoneAlphaAndEpsilon) {
  Rng rng(11);
  for (int fault = 0; fault < 3; ++fault) {
    AccountantSettings set;
    set.lambda = 0.05;
    set.fault = static_cast<AccountantFault>(fault);
    MomentsAccountant acc(set);
    double prev_eps = acc.Epsilon();
    std::vector<double> prev = acc.alpha();
    for (int t = 0; t < 200; ++t) {
      const int64_t n1 = static_cast<int64_t>(rng.UniformInt(11));
      acc.Update({10 - n1, n1});
      for (size_t l = 0; l < prev.size(); ++l) ASSERT_GE(acc.alpha()[l], prev[l]);
      ASSERT_GE(acc.Epsilon(), prev_eps);
      prev = acc.alpha();
      prev_eps = acc.Epsilon();
    }
  }
}

TEST(Accountant, FaultOrderingOnReplay) {
  Rng rng(12);
  std::vector<VoteTally> stream;
  for (int t = 0; t < 500; ++t) {
    const int64_t n1 = static_cast<int64_t>(rng.UniformInt(6));
    stream.push_back({5 - n1, n1});
  }
  for (double lambda : {1e-3, 0.3}) {
    AccountantSettings base;
    base.lambda = lambda;
    AccountantSettings ml = base;
    ml.fault = AccountantFault::kMissingLog;
    AccountantSettings is = base;
    is.fault = AccountantFault::kIndexShift;
    MomentsAccountant a(base), b(ml), c(is);
    for (const VoteTally& t : stream) {
      a.Update(t);
      b.Update(t);
      c.Update(t);
      ASSERT_GE(b.Epsilon(), a.Epsilon());
      ASSERT_GE(a.Epsilon(), c.Epsilon());
    }
  }
}

TEST(Accountant, StrictNeverExceedsPategan) {
  Rng rng(13);
  AccountantSettings p;
  p.lambda = 0.2;
  AccountantSettings s = p;
  s.mode = AccountantMode::kPateStrict;
  MomentsAccountant a(p), b(s);
  for (int t = 0; t < 300; ++t) {
    const int64_t n1 = static_cast<int64_t>(rng.UniformInt(8));
    a.Update({7 - n1, n1});
    b.Update({7 - n1, n1});
    ASSERT_LE(b.Epsilon(), a.Epsilon());
  }
  EXPECT_GT(b.q_violations(), 0);
  EXPECT_EQ(a.q_violations(), 0);
}

TEST(Accountant, ReplayIsBitExact) {
  Rng rng(14);
  AccountantSettings set;
  MomentsAccountant a(set);
  std::vector<VoteTally> stream;
  for (int t = 0; t < 100; ++t) {
    const int64_t n1 = static_cast<int64_t>(rng.UniformInt(4));
    stream.push_back({3 - n1, n1});
    a.Update(stream.back());
  }
  MomentsAccountant b(set);
  b.Update(stream);
  EXPECT_EQ(a.alpha(), b.alpha());
  EXPECT_EQ(a.Epsilon(), b.Epsilon());
  MomentsAccountant c(set);
  EXPECT_EQ(c.AlphaAfter(stream), a.alpha());
  EXPECT_TRUE(c.alpha() == std::vector<double>(100, 0.0));
}

TEST(Accountant, TraceLine) {
  AccountantSettings set;
  set.num_moments = 3;
  MomentsAccountant acc(set);
  acc.Update({1, 2});
  std::ostringstream out;
  WriteAccountantTraceLine(out, 7, acc);
  const auto j = nlohmann::json::parse(out.str());
  EXPECT_EQ(j["iter"], 7);
  EXPECT_EQ(j["alpha"].size(), 3u);
  EXPECT_DOUBLE_EQ(j["epsilon_hat"].get<double>(), acc.Epsilon());
}

TEST(Accountant, SettingsValidation) {
  AccountantSettings bad;
  bad.lambda = 0.0;
  EXPECT_THROW(MomentsAccountant{bad}, ConfigError);
  bad = {};
  bad.num_moments = 0;
  EXPECT_THROW(MomentsAccountant{bad}, ConfigError);
  bad = {};
  bad.delta = 1.0;
  EXPECT_THROW(MomentsAccountant{bad}, ConfigError);
}

TEST(Names, RoundTrip) {
  for (auto c : {NoiseConvention::kLapInvLambda, NoiseConvention::kLapLambda, NoiseConvention::kGaussian}) {
    EXPECT_EQ(NoiseConventionFromString(ToString(c)), c);
  }
  for (auto f : {AccountantFault::kNone, AccountantFault::kIndexShift, AccountantFault::kMissingLog}) {
    EXPECT_EQ(AccountantFaultFromString(ToString(f)), f);
  }
  EXPECT_THROW(AccountantModeFromString("nope"), ConfigError);
}

}  // namespace
}  // namespace pategan
