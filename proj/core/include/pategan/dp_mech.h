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

// Noise samplers, PATE noisy-argmax aggregation and the data-dependent
// moments accountant used by PATE-GAN.

#ifndef PATEGAN_DP_MECH_H_
#define PATEGAN_DP_MECH_H_

#include <cstdint>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "pategan/rng.h"

namespace pategan {

// Clean vote counts: n0 teachers said "fake", n1 said "real".
struct VoteTally {
  int64_t n0 = 0;
  int64_t n1 = 0;

  int64_t k() const { return n0 + n1; }
  bool operator==(const VoteTally&) const = default;
};

enum class NoiseConvention {
  kLapInvLambda,  // Laplace with scale 1/lambda
  kLapLambda,     // Laplace with scale lambda
  kGaussian,      // Normal with standard deviation 1/lambda
};

// Inverse-CDF Laplace(0, scale). Throws ConfigError unless scale > 0.
double LaplaceSample(double scale, Rng& rng);
// N(0, sigma^2). Throws ConfigError unless sigma > 0.
double GaussianSample(double sigma, Rng& rng);

// Scale (Laplace) or standard deviation (Gaussian) of the per-count noise.
double AggregationNoiseScale(NoiseConvention convention, double lambda);

struct AggregateResult {
  int label = 0;  // 1 = "real"
  VoteTally tally;
};

// Noisy argmax over {n0 + noise0, n1 + noise1}. noise0 is drawn before noise1.
AggregateResult PateAggregate(const std::vector<bool>& votes, double lambda,
                              NoiseConvention convention, Rng& rng);
AggregateResult PateAggregate(const VoteTally& tally, double lambda,
                              NoiseConvention convention, Rng& rng);

// q = (2 + lambda |n0 - n1|) / (4 exp(lambda |n0 - n1|)).
double AccountantQ(const VoteTally& tally, double lambda);
// q < (e^{2 lambda} - 1) / (e^{4 lambda} - 1).
bool QConditionHolds(double q, double lambda);

enum class AccountantMode { kPategan, kPateStrict };
enum class AccountantFault { kNone, kIndexShift, kMissingLog };

struct AccountantSettings {
  double lambda = 1e-3;
  int num_moments = 100;  // L
  double delta = 1e-5;
  AccountantMode mode = AccountantMode::kPategan;
  AccountantFault fault = AccountantFault::kNone;

  void Validate() const;
};

// Increment added to alpha(l) for a query with the given q. Honors the mode
// and the missing_log fault (index_shift acts on placement, not value).
// Returns +inf for a term that is undefined (1 - e^{2 lambda} q <= 0), so the
// other terms win the minimum.
double MomentIncrement(double q, double lambda, int l, AccountantMode mode,
                       AccountantFault fault);

// min over l of (alpha(l) + ln(1/delta)) / l, with alpha[0] holding l = 1.
double AccountantEpsilon(std::span<const double> alpha, double delta);

class MomentsAccountant {
 public:
  explicit MomentsAccountant(AccountantSettings settings);

  const AccountantSettings& settings() const { return settings_; }
  const std::vector<double>& alpha() const { return alpha_; }
  int64_t num_updates() const { return updates_; }
  // Queries (in pate_strict mode) whose q failed QConditionHolds.
  int64_t q_violations() const { return q_violations_; }

  void Update(const VoteTally& tally);
  void Update(std::span<const VoteTally> tallies);

  // alpha / epsilon after the given updates, without applying them.
  std::vector<double> AlphaAfter(std::span<const VoteTally> tallies) const;
  double WouldBeEpsilon(std::span<const VoteTally> tallies) const;

  double Epsilon() const;

 private:
  void Accumulate(const VoteTally& tally, std::vector<double>& alpha) const;

  AccountantSettings settings_;
  std::vector<double> alpha_;
  int64_t updates_ = 0;
  int64_t q_violations_ = 0;
};

// {"iter": iter, "alpha": [...], "epsilon_hat": ...}
nlohmann::json AccountantTraceRecord(int64_t iter,
                                     const MomentsAccountant& accountant);
void WriteAccountantTraceLine(std::ostream& out, int64_t iter,
                              const MomentsAccountant& accountant);

const char* ToString(NoiseConvention c);
const char* ToString(AccountantMode m);
const char* ToString(AccountantFault f);
NoiseConvention NoiseConventionFromString(const std::string& s);
AccountantMode AccountantModeFromString(const std::string& s);
AccountantFault AccountantFaultFromString(const std::string& s);

}  // namespace pategan

#endif  // PATEGAN_DP_MECH_H_
