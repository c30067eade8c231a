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

#include "pategan/audit.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pategan/errors.h"
#include "pategan/metrics.h"
#include "pategan/serialization.h"
#include "parallel.h"

namespace pategan {
namespace {

constexpr uint64_t kAttackForestTag = 0xa77ac4f0;
constexpr uint64_t kTargetSearchTag = 0x7a5e1ec7;

bool RowsEqual(const Matrix& m, Eigen::Index r, const RowVector& v) {
  return (m.row(r).array() == v.array()).all();
}

bool Contains(const Dataset& ds, const RowVector& record) {
  for (Eigen::Index r = 0; r < ds.rows().rows(); ++r) {
    if (RowsEqual(ds.rows(), r, record)) return true;
  }
  return false;
}

double Median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

std::vector<double> Featurize(AttackKind attack, const Dataset& synthetic,
                              const std::vector<RowVector>& domain) {
  return attack == AttackKind::kQueryBased ? FeaturizeQueries(synthetic, domain)
                                           : FeaturizeNaive(synthetic);
}

struct Worlds {
  Dataset without;
  Dataset with;
};

Worlds BuildWorlds(const Dataset& data, const RowVector& target) {
  if (static_cast<size_t>(target.size()) != data.num_cols()) {
    throw ConfigError("target width does not match the data");
  }
  if (Contains(data, target)) return {RemoveRecord(data, target), data};
  return {data, AppendRecord(data, target)};
}

double PlugInEps(double fp, double n_neg, double fn, double n_pos, double delta) {
  const double a = std::max(fp / n_neg, 0.5 / n_neg);
  const double b = std::max(fn / n_pos, 0.5 / n_pos);
  return EpsEmp(a, b, delta);
}

}  // namespace

std::vector<double> FeaturizeNaive(const Dataset& synthetic) {
  const Matrix& x = synthetic.rows();
  std::vector<double> f;
  f.reserve(5 * static_cast<size_t>(x.cols()));
  for (Eigen::Index c = 0; c < x.cols(); ++c) {
    const auto col = x.col(c);
    const double mean = col.mean();
    const double var = (col.array() - mean).square().mean();
    std::vector<double> values(static_cast<size_t>(x.rows()));
    for (Eigen::Index r = 0; r < x.rows(); ++r) values[static_cast<size_t>(r)] = col[r];
    f.push_back(col.minCoeff());
    f.push_back(col.maxCoeff());
    f.push_back(mean);
    f.push_back(Median(std::move(values)));
    f.push_back(std::sqrt(var));
  }
  return f;
}

std::vector<RowVector> BinaryDomain(const Metadata& meta) {
  const size_t d = meta.num_columns();
  for (const ColumnSpec& c : meta.columns) {
    if (c.kind != ColumnKind::kBinary) {
      throw DataError("query domain needs all-binary columns; '" + c.name +
                      "' is numerical");
    }
  }
  if (d == 0) throw DataError("empty query domain");
  if (d > 20) throw DataError("query domain too large (more than 20 columns)");
  std::vector<RowVector> domain;
  const size_t size = size_t{1} << d;
  for (size_t code = 0; code < size; ++code) {
    RowVector r(static_cast<Eigen::Index>(d));
    for (size_t j = 0; j < d; ++j) {
      r[static_cast<Eigen::Index>(j)] = static_cast<double>((code >> (d - 1 - j)) & 1U);
    }
    domain.push_back(std::move(r));
  }
  return domain;
}

std::vector<double> FeaturizeQueries(const Dataset& synthetic,
                                     const std::vector<RowVector>& domain) {
  if (domain.empty()) throw DataError("empty query domain");
  std::vector<double> counts(domain.size(), 0.0);
  const Matrix& x = synthetic.rows();
  for (size_t q = 0; q < domain.size(); ++q) {
    if (domain[q].size() != x.cols()) throw DataError("domain width mismatch");
    for (Eigen::Index r = 0; r < x.rows(); ++r) {
      if (RowsEqual(x, r, domain[q])) counts[q] += 1.0;
    }
  }
  return counts;
}

void AuditConfig::Validate() const {
  if (games_per_world < 1) throw ConfigError("games per world must be positive");
  if (train_games + val_games + test_games != games_per_world) {
    throw ConfigError("train/validation/test split must sum to games per world");
  }
  if (train_games < 1 || val_games < 1 || test_games < 1) {
    throw ConfigError("every split portion needs at least one game");
  }
  if (!(confidence > 0.0 && confidence < 1.0)) {
    throw ConfigError("confidence must lie in (0, 1)");
  }
  if (synthetic_size < 1) throw ConfigError("synthetic size must be positive");
  if (max_attempts < 1) throw ConfigError("max attempts must be positive");
  if (!(model_config.delta >= 0.0 && model_config.delta < 1.0)) {
    throw ConfigError("delta must lie in [0, 1)");
  }
}

Dataset PlayGame(const AuditConfig& cfg, const Dataset& training,
                 uint64_t game_seed) {
  const size_t n_prime = cfg.synthetic_size;
  switch (cfg.generator) {
    case GeneratorKind::kVerbatim: {
      Matrix out(static_cast<Eigen::Index>(n_prime), training.rows().cols());
      for (size_t i = 0; i < n_prime; ++i) {
        out.row(static_cast<Eigen::Index>(i)) =
            training.rows().row(static_cast<Eigen::Index>(i % training.num_rows()));
      }
      return training.WithRows(std::move(out));
    }
    case GeneratorKind::kNoiseOnly: {
      Rng rng(game_seed);
      const Metadata& meta = training.meta();
      Matrix out(static_cast<Eigen::Index>(n_prime),
                 static_cast<Eigen::Index>(meta.num_columns()));
      for (Eigen::Index r = 0; r < out.rows(); ++r) {
        for (size_t c = 0; c < meta.num_columns(); ++c) {
          const ColumnSpec& spec = meta.columns[c];
          out(r, static_cast<Eigen::Index>(c)) =
              spec.kind == ColumnKind::kBinary
                  ? (rng.Uniform() < 0.5 ? spec.lower : spec.upper)
                  : spec.lower + rng.Uniform() * (spec.upper - spec.lower);
        }
      }
      return training.WithRows(std::move(out));
    }
    case GeneratorKind::kPateGan:
    default: {
      PateGanConfig mc = cfg.model_config;
      mc.seed = DeriveSeed(game_seed, {1});
      mc.trace = false;
      const PateGanModel model = Train(training, mc, cfg.profile);
      Rng rng(DeriveSeed(game_seed, {2}));
      return Generate(model, n_prime, rng);
    }
  }
}

GameTranscript RunGames(const AuditConfig& cfg, const Dataset& data,
                        const RowVector& target) {
  cfg.Validate();
  const Worlds worlds = BuildWorlds(data, target);
  std::vector<RowVector> domain;
  if (cfg.attack == AttackKind::kQueryBased) domain = BinaryDomain(data.meta());

  const size_t g = cfg.games_per_world;
  std::vector<std::vector<double>> features(2 * g);
  std::vector<int> retries(2 * g, 0);
  internal::ParallelFor(2 * g, cfg.workers, [&](size_t i) {
    const uint64_t world = i < g ? 0 : 1;
    const uint64_t game = i % g;
    const Dataset& training = world == 0 ? worlds.without : worlds.with;
    for (int attempt = 0;; ++attempt) {
      try {
        const Dataset synthetic = PlayGame(
            cfg, training,
            DeriveSeed(cfg.seed, {world, game, static_cast<uint64_t>(attempt)}));
        features[i] = Featurize(cfg.attack, synthetic, domain);
        retries[i] = attempt;
        return;
      } catch (const TrainingError&) {
        if (attempt + 1 >= cfg.max_attempts) throw;
      }
    }
  });

  GameTranscript t;
  t.games_per_world = g;
  const size_t width = features.front().size();
  t.features.resize(static_cast<Eigen::Index>(2 * g), static_cast<Eigen::Index>(width));
  t.world.resize(2 * g);
  for (size_t i = 0; i < 2 * g; ++i) {
    for (size_t j = 0; j < width; ++j) {
      t.features(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          features[i][j];
    }
    if (!std::isfinite(t.features.row(static_cast<Eigen::Index>(i)).sum())) {
      throw DataError("non-finite game features");
    }
    t.world[i] = i < g ? 0 : 1;
    t.retried_games += retries[i] > 0 ? 1 : 0;
  }
  return t;
}

double EpsEmp(double alpha_upper, double beta_upper, double delta) {
  if (!(alpha_upper > 0.0 && alpha_upper <= 1.0) ||
      !(beta_upper > 0.0 && beta_upper <= 1.0)) {
    throw ConfigError("eps_emp needs upper bounds in (0, 1]");
  }
  double best = 0.0;
  const double n1 = 1.0 - alpha_upper - delta;
  const double n2 = 1.0 - beta_upper - delta;
  if (n1 > 0.0) best = std::max(best, std::log(n1 / beta_upper));
  if (n2 > 0.0) best = std::max(best, std::log(n2 / alpha_upper));
  return best;
}

RatePair FitAndEvaluate(const GameTranscript& transcript,
                        const AuditConfig& cfg) {
  cfg.Validate();
  const size_t g = transcript.games_per_world;
  if (g != cfg.games_per_world ||
      static_cast<size_t>(transcript.features.rows()) != 2 * g) {
    throw ConfigError("transcript size does not match the audit split");
  }
  auto rows_in = [&](size_t lo, size_t hi) {
    std::vector<size_t> idx;
    for (size_t w = 0; w < 2; ++w) {
      for (size_t k = lo; k < hi; ++k) idx.push_back(w * g + k);
    }
    return idx;
  };
  auto gather = [&](const std::vector<size_t>& idx, Matrix& x, Vector& y) {
    x.resize(static_cast<Eigen::Index>(idx.size()), transcript.features.cols());
    y.resize(static_cast<Eigen::Index>(idx.size()));
    for (size_t i = 0; i < idx.size(); ++i) {
      x.row(static_cast<Eigen::Index>(i)) =
          transcript.features.row(static_cast<Eigen::Index>(idx[i]));
      y[static_cast<Eigen::Index>(i)] = transcript.world[idx[i]];
    }
  };
  Matrix x_train, x_val, x_test;
  Vector y_train, y_val, y_test;
  gather(rows_in(0, cfg.train_games), x_train, y_train);
  gather(rows_in(cfg.train_games, cfg.train_games + cfg.val_games), x_val, y_val);
  gather(rows_in(cfg.train_games + cfg.val_games, g), x_test, y_test);

  ClassifierOptions opts = cfg.attack_classifier;
  opts.workers = 1;
  const TrainedClassifier forest =
      FitClassifier(ClassifierKind::kRandomForest, x_train, y_train, opts,
                    DeriveSeed(cfg.seed, {kAttackForestTag}));
  const Vector val_scores = forest.PredictScores(x_val);
  const Vector test_scores = forest.PredictScores(x_test);

  // Candidate thresholds: every distinct validation score plus one above
  // all of them; "with target" is predicted when score >= threshold.
  std::vector<double> thresholds(val_scores.data(),
                                 val_scores.data() + val_scores.size());
  std::sort(thresholds.begin(), thresholds.end());
  thresholds.erase(std::unique(thresholds.begin(), thresholds.end()),
                   thresholds.end());
  thresholds.push_back(std::numeric_limits<double>::infinity());

  const double n_val = static_cast<double>(cfg.val_games);
  double best_eps = -1.0;
  double best_j = -std::numeric_limits<double>::infinity();
  double best_threshold = thresholds.front();
  for (double thr : thresholds) {
    double fp = 0.0;
    double fn = 0.0;
    for (Eigen::Index i = 0; i < val_scores.size(); ++i) {
      const bool says_with = val_scores[i] >= thr;
      if (y_val[i] > 0.5 && !says_with) fn += 1.0;
      if (y_val[i] < 0.5 && says_with) fp += 1.0;
    }
    const double eps = PlugInEps(fp, n_val, fn, n_val, cfg.delta());
    const double j = 1.0 - fp / n_val - fn / n_val;
    if (eps > best_eps || (eps == best_eps && j > best_j)) {
      best_eps = eps;
      best_j = j;
      best_threshold = thr;
    }
  }

  RatePair r;
  r.threshold = best_threshold;
  r.degenerate = forest.degenerate();
  r.n_pos = static_cast<int64_t>(cfg.test_games);
  r.n_neg = static_cast<int64_t>(cfg.test_games);
  for (Eigen::Index i = 0; i < test_scores.size(); ++i) {
    const bool says_with = test_scores[i] >= best_threshold;
    if (y_test[i] > 0.5 && !says_with) ++r.fn;
    if (y_test[i] < 0.5 && says_with) ++r.fp;
  }
  r.alpha = static_cast<double>(r.fp) / static_cast<double>(r.n_neg);
  r.beta = static_cast<double>(r.fn) / static_cast<double>(r.n_pos);
  r.alpha_upper = UpperBound(cfg.interval, r.fp, r.n_neg, cfg.confidence);
  r.beta_upper = UpperBound(cfg.interval, r.fn, r.n_pos, cfg.confidence);
  return r;
}

AuditReport AuditPipeline(const AuditConfig& cfg, const Dataset& data,
                          const RowVector& target) {
  const GameTranscript transcript = RunGames(cfg, data, target);
  AuditReport report;
  report.config = cfg;
  report.rates = FitAndEvaluate(transcript, cfg);
  report.eps_emp =
      EpsEmp(report.rates.alpha_upper, report.rates.beta_upper, cfg.delta());
  report.violation = report.eps_emp > cfg.model_config.epsilon_budget;
  report.retried_games = transcript.retried_games;
  return report;
}

nlohmann::json AuditReport::ToJson() const {
  const AuditConfig& c = config;
  nlohmann::json j;
  j["attack"] = ToString(c.attack);
  j["preset"] = c.preset;
  j["generator"] = ToString(c.generator);
  j["claimed_epsilon"] = c.model_config.epsilon_budget;
  j["delta"] = c.delta();
  j["games"] = c.games_per_world;
  j["split"] = {{"train", c.train_games}, {"val", c.val_games}, {"test", c.test_games}};
  j["alpha"] = rates.alpha;
  j["beta"] = rates.beta;
  j["alpha_upper"] = rates.alpha_upper;
  j["beta_upper"] = rates.beta_upper;
  j["counts"] = {{"fp", rates.fp}, {"fn", rates.fn},
                 {"n_with_target", rates.n_pos}, {"n_without_target", rates.n_neg}};
  j["threshold"] = std::isfinite(rates.threshold) ? nlohmann::json(rates.threshold)
                                                  : nlohmann::json("inf");
  j["interval_method"] = ToString(c.interval);
  j["confidence"] = c.confidence;
  j["eps_emp"] = eps_emp;
  j["violation"] = violation;
  j["epsilon_is_data_dependent"] = c.profile.pate_enabled;
  j["synthetic_size"] = c.synthetic_size;
  j["seed"] = c.seed;
  j["retried_games"] = retried_games;
  j["fault_profile"] = FaultProfileToJson(c.profile);
  j["model_config"] = ConfigToJson(c.model_config);
  return j;
}

TargetSelection SelectTarget(const AuditConfig& cfg, const Dataset& data,
                             size_t num_candidates, size_t games_per_world,
                             double test_fraction) {
  if (num_candidates < 1) throw ConfigError("need at least one candidate");
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw ConfigError("test fraction must lie in (0, 1)");
  }
  const size_t test = static_cast<size_t>(
      std::llround(test_fraction * static_cast<double>(games_per_world)));
  if (test < 1 || test >= games_per_world) {
    throw ConfigError("mini attack split leaves an empty portion");
  }
  TargetSelection sel;
  if (num_candidates > data.num_rows()) {
    throw DataError("dataset has fewer records than target candidates");
  }
  sel.candidates = FarthestFromMean(ScaleMinMax(data, ScaleDirection::kForward),
                                    num_candidates);
  for (size_t c = 0; c < sel.candidates.size(); ++c) {
    AuditConfig mini = cfg;
    mini.attack = AttackKind::kGroundHog;
    mini.games_per_world = games_per_world;
    mini.train_games = games_per_world - test - 1;
    mini.val_games = 1;
    mini.test_games = test;
    if (mini.train_games < 1) throw ConfigError("mini attack needs more games");
    mini.seed = DeriveSeed(cfg.seed, {kTargetSearchTag, c});
    const RowVector target = data.rows().row(static_cast<Eigen::Index>(sel.candidates[c]));
    const GameTranscript t = RunGames(mini, data, target);

    std::vector<size_t> train_idx;
    std::vector<size_t> test_idx;
    for (size_t w = 0; w < 2; ++w) {
      for (size_t k = 0; k < games_per_world; ++k) {
        (k < games_per_world - test ? train_idx : test_idx).push_back(w * games_per_world + k);
      }
    }
    auto gather = [&](const std::vector<size_t>& idx, Matrix& x, Vector& y) {
      x.resize(static_cast<Eigen::Index>(idx.size()), t.features.cols());
      y.resize(static_cast<Eigen::Index>(idx.size()));
      for (size_t i = 0; i < idx.size(); ++i) {
        x.row(static_cast<Eigen::Index>(i)) = t.features.row(static_cast<Eigen::Index>(idx[i]));
        y[static_cast<Eigen::Index>(i)] = t.world[idx[i]];
      }
    };
    Matrix xtr, xte;
    Vector ytr, yte;
    gather(train_idx, xtr, ytr);
    gather(test_idx, xte, yte);
    ClassifierOptions opts = cfg.attack_classifier;
    opts.workers = 1;
    const TrainedClassifier forest = FitClassifier(
        ClassifierKind::kRandomForest, xtr, ytr, opts,
        DeriveSeed(mini.seed, {kAttackForestTag}));
    const double auc = Auroc(yte, forest.PredictScores(xte)).value;
    sel.candidate_auc.push_back(auc);
    if (c == 0 || auc > sel.auc) {
      sel.auc = auc;
      sel.index = sel.candidates[c];
    }
  }
  return sel;
}

const char* ToString(AttackKind a) {
  return a == AttackKind::kQueryBased ? "querybased" : "groundhog";
}

const char* ToString(GeneratorKind g) {
  switch (g) {
    case GeneratorKind::kPateGan:
      return "pategan";
    case GeneratorKind::kVerbatim:
      return "verbatim";
    case GeneratorKind::kNoiseOnly:
      return "noise_only";
  }
  return "?";
}

AttackKind AttackKindFromString(const std::string& s) {
  if (s == "querybased") return AttackKind::kQueryBased;
  if (s == "groundhog") return AttackKind::kGroundHog;
  throw ConfigError("unknown attack '" + s + "' (valid: querybased, groundhog)");
}

GeneratorKind GeneratorKindFromString(const std::string& s) {
  if (s == "pategan") return GeneratorKind::kPateGan;
  if (s == "verbatim") return GeneratorKind::kVerbatim;
  if (s == "noise_only") return GeneratorKind::kNoiseOnly;
  throw ConfigError("unknown generator '" + s +
                    "' (valid: pategan, verbatim, noise_only)");
}

}  // namespace pategan
