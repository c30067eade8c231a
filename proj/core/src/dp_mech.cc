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

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>

#include "pategan/errors.h"

namespace pategan {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

double LaplaceSample(double scale, Rng& rng) {
  if (!(scale > 0.0) || !std::isfinite(scale)) {
    throw ConfigError("Laplace scale must be positive and finite");
  }
  const double u = rng.UniformOpen() - 0.5;
  const double sign = u < 0.0 ? -1.0 : 1.0;
  return -scale * sign * std::log1p(-2.0 * std::abs(u));
}

double GaussianSample(double sigma, Rng& rng) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw ConfigError("Gaussian sigma must be positive and finite");
  }
  return sigma * rng.Normal();
}

double AggregationNoiseScale(NoiseConvention convention, double lambda) {
  if (!(lambda > 0.0)) throw ConfigError("lambda must be positive");
  return convention == NoiseConvention::kLapLambda ? lambda : 1.0 / lambda;
}

AggregateResult PateAggregate(const VoteTally& tally, double lambda,
                              NoiseConvention convention, Rng& rng) {
  if (tally.n0 < 0 || tally.n1 < 0) throw ConfigError("negative vote count");
  if (tally.k() < 1) throw ConfigError("PATE aggregation needs at least one vote");
  const double scale = AggregationNoiseScale(convention, lambda);
  double noise0;
  double noise1;
  if (convention == NoiseConvention::kGaussian) {
    noise0 = GaussianSample(scale, rng);
    noise1 = GaussianSample(scale, rng);
  } else {
    noise0 = LaplaceSample(scale, rng);
    noise1 = LaplaceSample(scale, rng);
  }
  const double s0 = static_cast<double>(tally.n0) + noise0;
  const double s1 = static_cast<double>(tally.n1) + noise1;
  return {s1 > s0 ? 1 : 0, tally};
}

AggregateResult PateAggregate(const std::vector<bool>& votes, double lambda,
                              NoiseConvention convention, Rng& rng) {
  if (votes.empty()) throw ConfigError("PATE aggregation needs at least one vote");
  VoteTally t;
  for (bool v : votes) (v ? t.n1 : t.n0) += 1;
  return PateAggregate(t, lambda, convention, rng);
}

double AccountantQ(const VoteTally& tally, double lambda) {
  if (!(lambda > 0.0)) throw ConfigError("lambda must be positive");
  const double x = lambda * static_cast<double>(std::llabs(tally.n0 - tally.n1));
  // (2 + x) e^{-x} / 4; underflows to 0 for very confident tallies.
  return (2.0 + x) * std::exp(-x) / 4.0;
}

bool QConditionHolds(double q, double lambda) {
  // (e^{2l} - 1) / (e^{4l} - 1) = 1 / (e^{2l} + 1).
  return q < 1.0 / (std::exp(2.0 * lambda) + 1.0);
}

void AccountantSettings::Validate() const {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw ConfigError("accountant lambda must be positive");
  }
  if (num_moments < 1) throw ConfigError("accountant needs at least one moment");
  if (!(delta > 0.0 && delta < 1.0)) throw ConfigError("delta must lie in (0, 1)");
}

double MomentIncrement(double q, double lambda, int l, AccountantMode mode,
                       AccountantFault fault) {
  if (!(q >= 0.0 && q <= 0.5)) {
    throw ConfigError("accountant q outside (0, 0.5]: corrupted tally");
  }
  const double dl = static_cast<double>(l);
  const double first = 2.0 * lambda * lambda * dl * (dl + 1.0);

  // (1-q) ((1-q)/(1-e^{2 lambda} q))^l + q e^{2 lambda l}
  //   = 1 + (1-q) expm1(l log r) + q expm1(2 lambda l),
  // r = 1 + q expm1(2 lambda) / (1 - e^{2 lambda} q).
  const double em = std::expm1(2.0 * lambda);
  const double denom = (1.0 - q) - q * em;
  double second = kInf;
  if (denom > 0.0) {
    const double log_r = std::log1p(q * em / denom);
    const double excess =
        (1.0 - q) * std::expm1(dl * log_r) + q * std::expm1(2.0 * lambda * dl);
    second = fault == AccountantFault::kMissingLog ? 1.0 + excess
                                                   : std::log1p(excess);
    if (std::isnan(second)) second = kInf;
  }
  double inc = std::min(first, second);
  if (mode == AccountantMode::kPateStrict) inc = std::min(inc, 2.0 * lambda * dl);
  return inc;
}

double AccountantEpsilon(std::span<const double> alpha, double delta) {
  if (alpha.empty()) throw ConfigError("accountant has no moments");
  if (!(delta > 0.0 && delta < 1.0)) throw ConfigError("delta must lie in (0, 1)");
  const double log_inv_delta = -std::log(delta);
  double best = kInf;
  for (size_t i = 0; i < alpha.size(); ++i) {
    best = std::min(best, (alpha[i] + log_inv_delta) / static_cast<double>(i + 1));
  }
  return best;
}

MomentsAccountant::MomentsAccountant(AccountantSettings settings)
    : settings_(settings) {
  settings_.Validate();
  alpha_.assign(static_cast<size_t>(settings_.num_moments), 0.0);
}

void MomentsAccountant::Accumulate(const VoteTally& tally,
                                   std::vector<double>& alpha) const {
  if (tally.n0 < 0 || tally.n1 < 0 || tally.k() < 1) {
    throw ConfigError("invalid vote tally");
  }
  const double q = AccountantQ(tally, settings_.lambda);
  const int L = settings_.num_moments;
  if (settings_.fault == AccountantFault::kIndexShift) {
    // Moment l receives the increment meant for l - 1; the first moment gets
    // nothing and the increment for moment L is never computed.
    for (int l = L; l >= 2; --l) {
      alpha[l - 1] += MomentIncrement(q, settings_.lambda, l - 1, settings_.mode,
                                      settings_.fault);
    }
    return;
  }
  for (int l = 1; l <= L; ++l) {
    alpha[l - 1] +=
        MomentIncrement(q, settings_.lambda, l, settings_.mode, settings_.fault);
  }
}

void MomentsAccountant::Update(const VoteTally& tally) {
  Accumulate(tally, alpha_);
  ++updates_;
  if (settings_.mode == AccountantMode::kPateStrict &&
      !QConditionHolds(AccountantQ(tally, settings_.lambda), settings_.lambda)) {
    ++q_violations_;
  }
}

void MomentsAccountant::Update(std::span<const VoteTally> tallies) {
  for (const VoteTally& t : tallies) Update(t);
}

std::vector<double> MomentsAccountant::AlphaAfter(
    std::span<const VoteTally> tallies) const {
  std::vector<double> alpha = alpha_;
  for (const VoteTally& t : tallies) Accumulate(t, alpha);
  return alpha;
}

double MomentsAccountant::WouldBeEpsilon(
    std::span<const VoteTally> tallies) const {
  return AccountantEpsilon(AlphaAfter(tallies), settings_.delta);
}

double MomentsAccountant::Epsilon() const {
  return AccountantEpsilon(alpha_, settings_.delta);
}

nlohmann::json AccountantTraceRecord(int64_t iter,
                                     const MomentsAccountant& accountant) {
  return {{"iter", iter},
          {"alpha", accountant.alpha()},
          {"epsilon_hat", accountant.Epsilon()}};
}

void WriteAccountantTraceLine(std::ostream& out, int64_t iter,
                              const MomentsAccountant& accountant) {
  out << AccountantTraceRecord(iter, accountant).dump() << '\n';
}

const char* ToString(NoiseConvention c) {
  switch (c) {
    case NoiseConvention::kLapInvLambda:
      return "lap_inv_lambda";
    case NoiseConvention::kLapLambda:
      return "lap_lambda";
    case NoiseConvention::kGaussian:
      return "gaussian";
  }
  return "?";
}

const char* ToString(AccountantMode m) {
  return m == AccountantMode::kPategan ? "pategan" : "pate_strict";
}

const char* ToString(AccountantFault f) {
  switch (f) {
    case AccountantFault::kNone:
      return "none";
    case AccountantFault::kIndexShift:
      return "index_shift";
    case AccountantFault::kMissingLog:
      return "missing_log";
  }
  return "?";
}

NoiseConvention NoiseConventionFromString(const std::string& s) {
  if (s == "lap_inv_lambda") return NoiseConvention::kLapInvLambda;
  if (s == "lap_lambda") return NoiseConvention::kLapLambda;
  if (s == "gaussian") return NoiseConvention::kGaussian;
  throw ConfigError("unknown noise convention '" + s + "'");
}

AccountantMode AccountantModeFromString(const std::string& s) {
  if (s == "pategan") return AccountantMode::kPategan;
  if (s == "pate_strict") return AccountantMode::kPateStrict;
  throw ConfigError("unknown accountant mode '" + s + "'");
}

AccountantFault AccountantFaultFromString(const std::string& s) {
  if (s == "none") return AccountantFault::kNone;
  if (s == "index_shift") return AccountantFault::kIndexShift;
  if (s == "missing_log") return AccountantFault::kMissingLog;
  throw ConfigError("unknown accountant fault '" + s + "'");
}

}  // namespace pategan
