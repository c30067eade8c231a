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

#include "pategan/pategan.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numeric>
#include <utility>

#include "pategan/classifiers.h"
#include "pategan/errors.h"

namespace pategan {
namespace {

// Independent random streams of one training run.
enum Stream : uint64_t {
  kInitStream = 1,
  kPartitionStream = 2,
  kLoopStream = 3,
  kAggregationStream = 4,
};

constexpr double kProbClip = 1e-7;

std::vector<size_t> Widths(size_t in, const std::vector<size_t>& hidden,
                           size_t out) {
  std::vector<size_t> w = {in};
  w.insert(w.end(), hidden.begin(), hidden.end());
  w.push_back(out);
  return w;
}

Matrix SampleLatent(Rng& rng, size_t n, size_t dim) {
  Matrix z(n, dim);
  for (Eigen::Index i = 0; i < z.size(); ++i) z.data()[i] = rng.Normal();
  return z;
}

Matrix GatherRows(const Matrix& rows, std::span<const size_t> idx) {
  Matrix out(idx.size(), rows.cols());
  for (size_t i = 0; i < idx.size(); ++i) out.row(i) = rows.row(idx[i]);
  return out;
}

// Distinct records each teacher has been given so far.
class SeenTracker {
 public:
  SeenTracker(size_t teachers, size_t records)
      : seen_(teachers, std::vector<uint8_t>(records, 0)), counts_(teachers, 0) {}

  void Mark(size_t teacher, std::span<const size_t> idx) {
    for (size_t r : idx) {
      if (!seen_[teacher][r]) {
        seen_[teacher][r] = 1;
        ++counts_[teacher];
      }
    }
  }

  const std::vector<size_t>& counts() const { return counts_; }

  // FNV-1a over the membership bitmap.
  std::vector<uint64_t> Digests() const {
    std::vector<uint64_t> out;
    for (const auto& s : seen_) {
      uint64_t h = 0xcbf29ce484222325ULL;
      for (uint8_t b : s) h = (h ^ b) * 0x100000001b3ULL;
      out.push_back(h);
    }
    return out;
  }

 private:
  std::vector<std::vector<uint8_t>> seen_;
  std::vector<size_t> counts_;
};

void CheckFinite(double loss, const char* what) {
  if (!std::isfinite(loss)) {
    throw TrainingError(std::string("non-finite ") + what + " loss");
  }
}

// One discriminator step on real (label 1) vs fake (label 0) rows.
Gradients DiscriminatorGradients(const Mlp& disc, const Matrix& real,
                                 const Matrix& fake) {
  Matrix x(real.rows() + fake.rows(), real.cols());
  x << real, fake;
  Vector y(x.rows());
  y.head(real.rows()).setOnes();
  y.tail(fake.rows()).setZero();
  auto [out, cache] = disc.Forward(x);
  BceResult loss = BceLoss(out.col(0), y);
  CheckFinite(loss.loss, "discriminator");
  return disc.Backward(cache, loss.grad);
}

Mlp FitLogRegTeacher(const Matrix& real, const Matrix& fake) {
  Matrix x(real.rows() + fake.rows(), real.cols());
  x << real, fake;
  Vector y(x.rows());
  y.head(real.rows()).setOnes();
  y.tail(fake.rows()).setZero();
  LogRegFit fit = FitLogisticRegression(x, y, 1.0, 100, 1e-8);
  const size_t d = static_cast<size_t>(real.cols());
  std::vector<Matrix> w = {Matrix(fit.weights)};
  std::vector<Matrix> b = {Matrix::Constant(1, 1, fit.intercept)};
  return Mlp({d, 1}, HiddenActivation::kRelu, OutputActivation::kSigmoid,
             std::move(w), std::move(b));
}

double MeanRealCrossEntropy(const Mlp& teacher, const Matrix& rows) {
  const Matrix p = teacher.Predict(rows);
  double s = 0.0;
  for (Eigen::Index i = 0; i < p.rows(); ++i) {
    s -= std::log(std::clamp(p(i, 0), kProbClip, 1.0 - kProbClip));
  }
  return s / static_cast<double>(p.rows());
}

// The tally with the smallest margin is the most expensive query of a batch.
VoteTally CostliestTally(const std::vector<VoteTally>& tallies) {
  size_t best = 0;
  for (size_t i = 1; i < tallies.size(); ++i) {
    if (std::llabs(tallies[i].n0 - tallies[i].n1) <
        std::llabs(tallies[best].n0 - tallies[best].n1)) {
      best = i;
    }
  }
  return tallies[best];
}

double ClipAndNoise(Gradients& g, double clip_norm, double noise_std, Rng& rng) {
  double sq = 0.0;
  for (const auto& w : g.weights) sq += w.squaredNorm();
  for (const auto& b : g.biases) sq += b.squaredNorm();
  const double norm = std::sqrt(sq);
  if (norm > clip_norm) g *= clip_norm / norm;
  if (noise_std > 0.0) {
    for (auto* set : {&g.weights, &g.biases}) {
      for (auto& m : *set) {
        for (Eigen::Index i = 0; i < m.size(); ++i) {
          m.data()[i] += noise_std * rng.Normal();
        }
      }
    }
  }
  return norm;
}

bool ViewsDisjoint(const TeacherPartition& p) {
  std::vector<uint8_t> used(p.num_records(), 0);
  for (size_t t = 0; t < p.num_teachers(); ++t) {
    for (size_t r : p.View(t)) {
      if (used[r]) return false;
      used[r] = 1;
    }
  }
  return true;
}

}  // namespace

bool FaultProfile::IsFaithful() const { return *this == FaultProfile{}; }

void PateGanConfig::Validate(size_t d, size_t n) const {
  auto fail = [](const std::string& m) { throw ConfigError(m); };
  if (!(epsilon_budget > 0.0) || !std::isfinite(epsilon_budget)) {
    fail("epsilon budget must be positive and finite");
  }
  if (!(delta > 0.0 && delta < 1.0)) fail("delta must lie in (0, 1)");
  if (!(lambda > 0.0) || !std::isfinite(lambda)) fail("lambda must be positive");
  if (num_moments < 1) fail("number of moments must be at least 1");
  if (num_teachers < 1) fail("need at least one teacher");
  if (num_teachers > n) {
    fail("more teachers (" + std::to_string(num_teachers) + ") than records (" +
         std::to_string(n) + ")");
  }
  if (teacher_iters < 1 || student_iters < 1 || generator_iters < 1) {
    fail("teacher, student and generator iterations must be at least 1");
  }
  if (batch_size < 1) fail("batch size must be at least 1");
  if (max_iters < 1) fail("max iterations must be at least 1");
  if (noise_dim < 1) fail("noise dimension must be at least 1");
  if (d < 1) fail("data needs at least one column");
  for (const auto* h : {&generator_hidden, &teacher_hidden, &student_hidden}) {
    for (size_t w : *h) {
      if (w < 1) fail("hidden layer widths must be positive");
    }
  }
  if (!(learning_rate > 0.0)) fail("learning rate must be positive");
  if (!(clip_norm > 0.0)) fail("clip norm must be positive");
}

Gradients GeneratorGradients(const Mlp& generator, const Mlp& student,
                             const Matrix& z, GeneratorLoss loss) {
  auto [fake, gen_cache] = generator.Forward(z);
  auto [s, stu_cache] = student.Forward(fake);
  const double n = static_cast<double>(s.rows());
  Matrix ds(s.rows(), 1);
  double total = 0.0;
  for (Eigen::Index i = 0; i < s.rows(); ++i) {
    const double raw = s(i, 0);
    const double p = std::clamp(raw, kProbClip, 1.0 - kProbClip);
    const bool clipped = raw != p;
    if (loss == GeneratorLoss::kNonSaturating) {
      total -= std::log(p);
      ds(i, 0) = clipped ? 0.0 : -1.0 / (n * p);
    } else {
      total += std::log(1.0 - p);
      ds(i, 0) = clipped ? 0.0 : -1.0 / (n * (1.0 - p));
    }
  }
  CheckFinite(total, "generator");
  Gradients through_student = student.Backward(stu_cache, ds);
  return generator.Backward(gen_cache, through_student.input);
}

double GaussianNoiseMultiplier(double epsilon, double delta,
                               DeltaScaleFault fault) {
  if (!(epsilon > 0.0)) throw ConfigError("epsilon must be positive");
  if (!(delta > 0.0 && delta < 1.0)) throw ConfigError("delta must lie in (0, 1)");
  double log_term;
  switch (fault) {
    case DeltaScaleFault::kXorPower: {
      // 10 ** e written as 10 ^ e: delta = 1e-5 becomes 1 / (10 XOR 5) = 1/15.
      const long long e = std::llround(-std::log10(delta));
      const double bad_delta = 1.0 / static_cast<double>(10LL ^ e);
      log_term = std::log(1.25 / bad_delta);
      break;
    }
    case DeltaScaleFault::kMultDiv:
      log_term = std::log(1.25 * delta);
      break;
    case DeltaScaleFault::kNone:
    default:
      log_term = std::log(1.25 / delta);
      break;
  }
  if (!(log_term > 0.0)) return 0.0;
  return std::sqrt(2.0 * log_term) / epsilon;
}

PateGanModel Train(const Dataset& data, const PateGanConfig& cfg,
                   const FaultProfile& profile) {
  const size_t d = data.num_cols();
  const size_t n = data.num_rows();
  cfg.Validate(d, n);

  std::optional<std::string> warning;
  std::shared_ptr<const Metadata> scaling = data.meta_ptr();
  if (profile.bounds_from_data) {
    EmpiricalFit fit = FitEmpiricalBounds(data);
    warning = fit.warning;
    scaling = std::make_shared<const Metadata>(std::move(fit.meta));
  }
  const Dataset scaled = ScaleMinMax(data.WithMeta(scaling), ScaleDirection::kForward);
  const Matrix& rows = scaled.rows();
  const size_t label_col = scaling->label_index;
  const double label_rate =
      (rows.col(static_cast<Eigen::Index>(label_col)).array() > 0.5)
          .cast<double>()
          .mean();

  Rng init_rng(DeriveSeed(cfg.seed, {kInitStream}));
  Rng rng(DeriveSeed(cfg.seed, {kLoopStream}));
  Rng agg_rng(DeriveSeed(cfg.seed, {kAggregationStream}));

  Mlp generator = Mlp::Create(Widths(cfg.noise_dim, cfg.generator_hidden, d),
                              HiddenActivation::kRelu,
                              OutputActivation::kSigmoid, init_rng);
  Mlp student = Mlp::Create(Widths(d, cfg.student_hidden, 1),
                            HiddenActivation::kRelu,
                            OutputActivation::kSigmoid, init_rng);
  OptimizerSettings opt_settings;
  opt_settings.kind = cfg.optimizer;
  opt_settings.learning_rate = cfg.learning_rate;
  Optimizer gen_opt(opt_settings);
  Optimizer stu_opt(opt_settings);

  AccountantSettings acc_settings;
  acc_settings.lambda = cfg.lambda;
  acc_settings.num_moments = cfg.num_moments;
  acc_settings.delta = cfg.delta;
  acc_settings.mode = cfg.accountant_mode;
  acc_settings.fault = profile.accountant_fault;
  MomentsAccountant accountant(acc_settings);

  std::optional<TrainingTrace> trace;
  if (cfg.trace) trace.emplace();

  const size_t batch = cfg.batch_size;
  int64_t iter = 0;
  TrainingStatus status = TrainingStatus::kMaxIters;
  std::vector<Mlp> teachers;

  auto generator_round = [&] {
    for (int g = 0; g < cfg.generator_iters; ++g) {
      const Matrix z = SampleLatent(rng, batch, cfg.noise_dim);
      Gradients grads = GeneratorGradients(generator, student, z, cfg.generator_loss);
      gen_opt.Step(generator, grads);
    }
  };

  if (!profile.pate_enabled) {
    // Single discriminator over all records, DP-SGD style noise on its
    // clipped gradient, no accounting.
    const double noise_std =
        GaussianNoiseMultiplier(cfg.epsilon_budget, cfg.delta,
                                profile.delta_scale_fault) *
        cfg.clip_norm / static_cast<double>(batch);
    for (; iter < cfg.max_iters; ++iter) {
      for (int s = 0; s < cfg.student_iters; ++s) {
        std::vector<size_t> idx(batch);
        for (size_t& r : idx) r = rng.UniformInt(n);
        const Matrix real = GatherRows(rows, idx);
        const Matrix fake =
            generator.Predict(SampleLatent(rng, batch, cfg.noise_dim));
        Gradients g = DiscriminatorGradients(student, real, fake);
        ClipAndNoise(g, cfg.clip_norm, noise_std, agg_rng);
        stu_opt.Step(student, g);
      }
      generator_round();
      if (trace) {
        TraceRecord rec;
        rec.iter = iter;
        trace->records.push_back(std::move(rec));
      }
    }
  } else {
    const TeacherPartition partition =
        PartitionTeachers(scaled, cfg.num_teachers, profile.partition_mode,
                          DeriveSeed(cfg.seed, {kPartitionStream}));
    if (profile.IsFaithful() && !ViewsDisjoint(partition)) {
      throw TrainingError("teacher partitions overlap under the faithful profile");
    }
    const size_t k = cfg.num_teachers;
    std::vector<Optimizer> teacher_opts;
    for (size_t i = 0; i < k; ++i) {
      teachers.push_back(Mlp::Create(Widths(d, cfg.teacher_hidden, 1),
                                     HiddenActivation::kRelu,
                                     OutputActivation::kSigmoid, init_rng));
      teacher_opts.emplace_back(opt_settings);
    }
    SeenTracker seen(k, n);
    std::vector<size_t> first_subset;

    bool stop = false;
    while (iter < cfg.max_iters) {
      if (!profile.budget_precheck && accountant.num_updates() > 0 &&
          accountant.Epsilon() >= cfg.epsilon_budget) {
        status = TrainingStatus::kBudgetReached;
        break;
      }
      TraceRecord rec;
      rec.iter = iter;

      for (int t = 0; t < cfg.teacher_iters; ++t) {
        const Matrix fake =
            generator.Predict(SampleLatent(rng, batch, cfg.noise_dim));
        // The all_last fault hands every teacher the same batch drawn from
        // the last block.
        std::vector<size_t> shared;
        if (profile.partition_mode == PartitionMode::kAllLast) {
          shared = partition.SampleBatch(k - 1, batch, rng);
        }
        for (size_t i = 0; i < k; ++i) {
          const std::vector<size_t> idx =
              profile.partition_mode == PartitionMode::kAllLast
                  ? shared
                  : partition.SampleBatch(i, batch, rng);
          seen.Mark(i, idx);
          if (i == 0 && first_subset.empty()) {
            first_subset = idx;
            std::sort(first_subset.begin(), first_subset.end());
            first_subset.erase(std::unique(first_subset.begin(), first_subset.end()),
                               first_subset.end());
          }
          const Matrix real = GatherRows(rows, idx);
          if (profile.teacher_model == TeacherModel::kLogReg) {
            teachers[i] = FitLogRegTeacher(real, fake);
          } else {
            Gradients g = DiscriminatorGradients(teachers[i], real, fake);
            teacher_opts[i].Step(teachers[i], g);
          }
        }
      }

      for (int s = 0; s < cfg.student_iters && !stop; ++s) {
        const Matrix fake =
            generator.Predict(SampleLatent(rng, batch, cfg.noise_dim));
        std::vector<VoteTally> tallies(batch);
        for (const Mlp& teacher : teachers) {
          const Matrix p = teacher.Predict(fake);
          for (size_t j = 0; j < batch; ++j) {
            (p(static_cast<Eigen::Index>(j), 0) > 0.5 ? tallies[j].n1
                                                      : tallies[j].n0) += 1;
          }
        }
        Vector labels(static_cast<Eigen::Index>(batch));
        for (size_t j = 0; j < batch; ++j) {
          labels[static_cast<Eigen::Index>(j)] =
              PateAggregate(tallies[j], cfg.lambda, profile.noise_convention,
                            agg_rng)
                  .label;
        }
        std::vector<VoteTally> queries =
            cfg.accountant_granularity == UpdateGranularity::kPerBatch
                ? std::vector<VoteTally>{CostliestTally(tallies)}
                : tallies;
        if (profile.budget_precheck &&
            accountant.WouldBeEpsilon(queries) > cfg.epsilon_budget) {
          status = accountant.num_updates() == 0
                       ? TrainingStatus::kBudgetExhaustedAtStart
                       : TrainingStatus::kBudgetReached;
          stop = true;
          break;
        }
        accountant.Update(queries);
        if (trace) {
          rec.tallies.insert(rec.tallies.end(), queries.begin(), queries.end());
        }

        auto [out, cache] = student.Forward(fake);
        BceResult loss = BceLoss(out.col(0), labels);
        CheckFinite(loss.loss, "student");
        stu_opt.Step(student, student.Backward(cache, loss.grad));
      }

      if (!stop) generator_round();

      if (trace) {
        rec.complete = !stop;
        rec.teachers_seen = seen.counts();
        rec.teachers_seen_digest = seen.Digests();
        if (!first_subset.empty()) {
          const Matrix subset = GatherRows(rows, first_subset);
          rec.teacher1_ce = MeanRealCrossEntropy(teachers[0], subset);
          if (k > 1) {
            double others = 0.0;
            for (size_t i = 1; i < k; ++i) {
              others += MeanRealCrossEntropy(teachers[i], subset);
            }
            rec.others_ce = others / static_cast<double>(k - 1);
          } else {
            rec.others_ce = std::numeric_limits<double>::quiet_NaN();
          }
        }
        rec.alpha = accountant.alpha();
        rec.epsilon_hat = accountant.Epsilon();
        if (!stop || !rec.tallies.empty()) trace->records.push_back(std::move(rec));
      }
      if (stop) break;
      ++iter;
    }
  }

  double epsilon_hat;
  if (!profile.pate_enabled) {
    epsilon_hat = cfg.epsilon_budget;
  } else {
    epsilon_hat = accountant.num_updates() == 0 ? 0.0 : accountant.Epsilon();
  }
  return PateGanModel{.config = cfg,
                      .profile = profile,
                      .scaling_meta = *scaling,
                      .label_rate = label_rate,
                      .generator = std::move(generator),
                      .teachers = std::move(teachers),
                      .student = std::move(student),
                      .alpha = accountant.alpha(),
                      .accountant_updates = accountant.num_updates(),
                      .q_violations = accountant.q_violations(),
                      .epsilon_hat = epsilon_hat,
                      .iterations = iter,
                      .status = status,
                      .bounds_warning = warning,
                      .trace = std::move(trace)};
}

Dataset Generate(const PateGanModel& model, size_t n_prime, Rng& rng) {
  if (n_prime < 1) throw ConfigError("synthetic sample size must be at least 1");
  const Matrix z = SampleLatent(rng, n_prime, model.config.noise_dim);
  Matrix out = model.generator.Predict(z);
  const Metadata& meta = model.scaling_meta;
  const Eigen::Index label = static_cast<Eigen::Index>(meta.label_index);

  if (model.profile.label_conditioning) {
    // Assign positives to the rows with the highest raw label output so the
    // label frequency matches the training data.
    const size_t m = static_cast<size_t>(
        std::llround(model.label_rate * static_cast<double>(n_prime)));
    std::vector<size_t> order(n_prime);
    std::iota(order.begin(), order.end(), size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
      return out(static_cast<Eigen::Index>(a), label) >
             out(static_cast<Eigen::Index>(b), label);
    });
    for (size_t i = 0; i < n_prime; ++i) {
      out(static_cast<Eigen::Index>(order[i]), label) = i < m ? 1.0 : 0.0;
    }
  }
  for (size_t c = 0; c < meta.num_columns(); ++c) {
    if (meta.columns[c].kind != ColumnKind::kBinary) continue;
    for (Eigen::Index r = 0; r < out.rows(); ++r) {
      double& v = out(r, static_cast<Eigen::Index>(c));
      v = v >= 0.5 ? 1.0 : 0.0;
    }
  }
  Dataset scaled(std::move(out), std::make_shared<const Metadata>(meta));
  return ScaleMinMax(scaled, ScaleDirection::kInverse);
}

const TrainingTrace& TraceTraining(const PateGanModel& model) {
  if (!model.trace) throw ConfigError("model was trained without tracing");
  return *model.trace;
}

const char* ToString(TeacherModel m) {
  return m == TeacherModel::kMlp ? "mlp" : "logreg";
}

const char* ToString(DeltaScaleFault f) {
  switch (f) {
    case DeltaScaleFault::kNone:
      return "none";
    case DeltaScaleFault::kXorPower:
      return "xor_power";
    case DeltaScaleFault::kMultDiv:
      return "mult_div";
  }
  return "?";
}

const char* ToString(UpdateGranularity g) {
  return g == UpdateGranularity::kPerBatch ? "per_batch" : "per_sample";
}

const char* ToString(GeneratorLoss g) {
  return g == GeneratorLoss::kNonSaturating ? "non_saturating" : "literal";
}

const char* ToString(TrainingStatus s) {
  switch (s) {
    case TrainingStatus::kMaxIters:
      return "max_iters";
    case TrainingStatus::kBudgetReached:
      return "budget_reached";
    case TrainingStatus::kBudgetExhaustedAtStart:
      return "budget_exhausted_at_start";
  }
  return "?";
}

TeacherModel TeacherModelFromString(const std::string& s) {
  if (s == "mlp") return TeacherModel::kMlp;
  if (s == "logreg") return TeacherModel::kLogReg;
  throw ConfigError("unknown teacher model '" + s + "'");
}

DeltaScaleFault DeltaScaleFaultFromString(const std::string& s) {
  if (s == "none") return DeltaScaleFault::kNone;
  if (s == "xor_power") return DeltaScaleFault::kXorPower;
  if (s == "mult_div") return DeltaScaleFault::kMultDiv;
  throw ConfigError("unknown delta scale fault '" + s + "'");
}

UpdateGranularity UpdateGranularityFromString(const std::string& s) {
  if (s == "per_batch") return UpdateGranularity::kPerBatch;
  if (s == "per_sample") return UpdateGranularity::kPerSample;
  throw ConfigError("unknown accountant granularity '" + s + "'");
}

GeneratorLoss GeneratorLossFromString(const std::string& s) {
  if (s == "non_saturating") return GeneratorLoss::kNonSaturating;
  if (s == "literal") return GeneratorLoss::kLiteral;
  throw ConfigError("unknown generator loss '" + s + "'");
}

TrainingStatus TrainingStatusFromString(const std::string& s) {
  if (s == "max_iters") return TrainingStatus::kMaxIters;
  if (s == "budget_reached") return TrainingStatus::kBudgetReached;
  if (s == "budget_exhausted_at_start") return TrainingStatus::kBudgetExhaustedAtStart;
  throw ConfigError("unknown training status '" + s + "'");
}

}  // namespace pategan
