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

#include "cli.h"

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "pategan/audit.h"
#include "pategan/bench.h"
#include "pategan/data_io.h"
#include "pategan/errors.h"
#include "pategan/intervals.h"
#include "pategan/pategan.h"
#include "pategan/serialization.h"

namespace pategan::cli {
namespace {

using nlohmann::json;

struct DataFlags {
  std::string data;
  std::string meta;
  std::string desk;
  size_t desk_rows = 1000;
};

struct ModelFlags {
  std::string preset = "faithful";
  std::optional<double> epsilon;
  std::optional<double> delta;
  std::optional<double> lambda;
  std::optional<size_t> teachers;
  std::optional<int64_t> max_iters;
  std::optional<size_t> batch_size;
  std::optional<int> moments;
  std::optional<double> learning_rate;
};

void AddDataFlags(CLI::App* cmd, DataFlags& f) {
  cmd->add_option("--data", f.data, "CSV file with a header row");
  cmd->add_option("--meta", f.meta, "metadata JSON for --data");
  cmd->add_option("--desk", f.desk, "built-in dataset: separable, imbalanced, binary3");
  cmd->add_option("--desk-rows", f.desk_rows, "rows of the built-in dataset");
}

void AddModelFlags(CLI::App* cmd, ModelFlags& f) {
  cmd->add_option("--preset", f.preset, "engine preset");
  cmd->add_option("--epsilon", f.epsilon, "privacy budget");
  cmd->add_option("--delta", f.delta, "privacy failure probability");
  cmd->add_option("--lambda", f.lambda, "aggregation noise parameter");
  cmd->add_option("--teachers", f.teachers, "number of teachers");
  cmd->add_option("--max-iters", f.max_iters, "training iteration cap");
  cmd->add_option("--batch-size", f.batch_size, "minibatch size");
  cmd->add_option("--moments", f.moments, "accountant moment orders");
  cmd->add_option("--lr", f.learning_rate, "optimizer learning rate");
}

Dataset LoadData(const DataFlags& f, uint64_t seed) {
  if (!f.desk.empty()) {
    if (!f.data.empty()) throw ConfigError("--desk and --data are exclusive");
    return DeskDataset(f.desk, f.desk_rows, seed);
  }
  if (f.data.empty() || f.meta.empty()) {
    throw ConfigError("need --data with --meta, or --desk");
  }
  auto meta = std::make_shared<const Metadata>(Metadata::LoadJson(f.meta));
  return LoadCsv(f.data, meta);
}

PresetBundle ResolveModel(const ModelFlags& f, size_t d, size_t n, uint64_t seed) {
  PresetBundle b = PresetConfig(f.preset, d, n);
  if (f.epsilon) b.config.epsilon_budget = *f.epsilon;
  if (f.delta) b.config.delta = *f.delta;
  if (f.lambda) b.config.lambda = *f.lambda;
  if (f.teachers) b.config.num_teachers = *f.teachers;
  if (f.max_iters) b.config.max_iters = *f.max_iters;
  if (f.batch_size) b.config.batch_size = *f.batch_size;
  if (f.moments) b.config.num_moments = *f.moments;
  if (f.learning_rate) b.config.learning_rate = *f.learning_rate;
  b.config.seed = seed;
  return b;
}

// "--name value" pairs exactly as typed.
json RawFlags(const std::vector<std::string>& args) {
  json flags = json::object();
  for (size_t i = 1; i < args.size(); ++i) {
    const std::string& a = args[i];
    if (a.rfind("--", 0) != 0) continue;
    const size_t eq = a.find('=');
    if (eq != std::string::npos) {
      flags[a.substr(2, eq - 2)] = a.substr(eq + 1);
    } else if (i + 1 < args.size() && args[i + 1].rfind("--", 0) != 0) {
      flags[a.substr(2)] = args[i + 1];
      ++i;
    } else {
      flags[a.substr(2)] = true;
    }
  }
  return flags;
}

std::string ManifestPath(const std::string& out) { return out + ".manifest.json"; }

std::string ManifestName(const std::string& out) {
  return std::filesystem::path(ManifestPath(out)).filename().string();
}

std::string UtcNow() {
  const std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void WriteText(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
  if (!out) throw std::runtime_error("write failed: " + path);
}

class Manifest {
 public:
  Manifest(std::string command, const std::vector<std::string>& args)
      : start_(std::chrono::steady_clock::now()) {
    doc_["command"] = std::move(command);
    doc_["argv"] = std::vector<std::string>(args.begin() + 1, args.end());
    doc_["flags"] = RawFlags(args);
    doc_["tool_version"] = PATEGAN_VERSION;
    doc_["started_at"] = UtcNow();
  }
  void Set(const std::string& key, json value) { doc_[key] = std::move(value); }
  void Write(const std::string& out, uint64_t seed) {
    const std::chrono::duration<double> wall =
        std::chrono::steady_clock::now() - start_;
    doc_["seed"] = seed;
    doc_["artifacts"] = {out};
    doc_["wall_clock_seconds"] = wall.count();
    WriteText(ManifestPath(out), doc_.dump(2) + "\n");
  }

 private:
  json doc_;
  std::chrono::steady_clock::time_point start_;
};

json ResolvedModel(const PresetBundle& b, const std::string& preset) {
  return {{"preset", preset},
          {"model_config", ConfigToJson(b.config)},
          {"fault_profile", FaultProfileToJson(b.profile)}};
}

std::vector<std::string> SplitList(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double ParseDouble(const std::string& s) {
  size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw ConfigError("not a number: '" + s + "'");
  }
  if (used != s.size()) throw ConfigError("not a number: '" + s + "'");
  return v;
}

void Diagnose(const char* kind, const std::string& message) {
  json d = {{"error", kind}, {"message", message}};
  if (message.find("preset") != std::string::npos) d["valid_presets"] = kPresetNames;
  std::cerr << d.dump() << std::endl;
}

}  // namespace

int DefaultWorkers() {
  const char* env = std::getenv("PATEGAN_WORKERS");
  if (env == nullptr) return 1;
  char* end = nullptr;
  const long v = std::strtol(env, &end, 10);
  if (end == env || *end != '\0' || v < 1) return 1;
  return static_cast<int>(v);
}

int Run(const std::vector<std::string>& args) {
  CLI::App app{"PATE-GAN training, generation, privacy auditing and utility benchmarks"};
  app.name(args.empty() ? "pategan" : std::filesystem::path(args[0]).filename().string());
  app.require_subcommand(1);
  app.set_version_flag("--version", PATEGAN_VERSION);

  uint64_t seed = 0;
  int workers = DefaultWorkers();
  std::string out;
  DataFlags data_flags;
  ModelFlags model_flags;

  auto common = [&](CLI::App* cmd, bool needs_out = true) {
    cmd->add_option("--seed", seed, "master seed");
    auto* o = cmd->add_option("--out", out, "output path");
    if (needs_out) o->required();
  };

  CLI::App* train = app.add_subcommand("train", "train a generator and save the model");
  AddDataFlags(train, data_flags);
  AddModelFlags(train, model_flags);
  common(train);

  CLI::App* generate = app.add_subcommand("generate", "sample synthetic records as CSV");
  std::string model_path;
  size_t n_prime = 0;
  generate->add_option("--model", model_path, "model file")->required();
  generate->add_option("--n", n_prime, "records to generate")->required();
  common(generate);

  CLI::App* audit = app.add_subcommand("audit", "run a membership distinguishing audit");
  std::string attack = "querybased";
  std::string generator = "pategan";
  size_t games = 1000;
  std::string interval = "clopper_pearson";
  double confidence = 0.95;
  size_t synthetic_size = 100;
  size_t repeat = 4;
  std::optional<size_t> target_index;
  size_t candidates = 64;
  size_t mini_games = 100;
  int max_attempts = 3;
  audit->add_option("--attack", attack, "querybased or groundhog");
  audit->add_option("--generator", generator, "pategan, verbatim or noise_only");
  audit->add_option("--games", games, "games per world");
  audit->add_option("--interval", interval, "clopper_pearson or bayesian");
  audit->add_option("--confidence", confidence, "interval confidence level");
  audit->add_option("--synthetic-size", synthetic_size, "synthetic rows per game");
  audit->add_option("--repeat", repeat, "all-zero records in the worst-case dataset");
  audit->add_option("--target-index", target_index, "target row of --data");
  audit->add_option("--candidates", candidates, "target search candidates");
  audit->add_option("--mini-games", mini_games, "games per world in target search");
  audit->add_option("--max-attempts", max_attempts, "attempts per failing game");
  audit->add_option("--workers", workers, "parallel games");
  AddDataFlags(audit, data_flags);
  AddModelFlags(audit, model_flags);
  common(audit);

  CLI::App* bench = app.add_subcommand("bench", "downstream utility benchmark");
  std::string classifiers = "logreg";
  std::string epsilons = "1";
  size_t n_models = 5;
  size_t n_synth = 5;
  double train_fraction = 0.8;
  size_t bench_synth_size = 0;
  std::string csv_path;
  bench->add_option("--classifiers", classifiers, "comma-separated classifier kinds");
  bench->add_option("--epsilons", epsilons, "comma-separated budgets");
  bench->add_option("--models", n_models, "generators per budget");
  bench->add_option("--synth", n_synth, "synthetic sets per generator");
  bench->add_option("--train-fraction", train_fraction, "real training share");
  bench->add_option("--synthetic-size", bench_synth_size, "rows per synthetic set");
  bench->add_option("--csv", csv_path, "also write a table as CSV");
  bench->add_option("--workers", workers, "parallel generator trainings");
  AddDataFlags(bench, data_flags);
  AddModelFlags(bench, model_flags);
  common(bench);

  CLI::App* trace = app.add_subcommand("trace", "train with instrumentation, write JSON lines");
  AddDataFlags(trace, data_flags);
  AddModelFlags(trace, model_flags);
  common(trace);

  std::vector<std::string> rest(args.rbegin(), args.rend());
  if (!rest.empty()) rest.pop_back();
  try {
    app.parse(rest);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    Diagnose("config", e.what());
    return 2;
  }

  try {
    if (workers < 1) throw ConfigError("--workers must be at least 1");
    if (train->parsed() || trace->parsed()) {
      const bool tracing = trace->parsed();
      const Dataset data = LoadData(data_flags, seed);
      PresetBundle b = ResolveModel(model_flags, data.num_cols(), data.num_rows(), seed);
      b.config.trace = tracing;
      Manifest manifest(tracing ? "trace" : "train", args);
      manifest.Set("config", ResolvedModel(b, model_flags.preset));
      const PateGanModel m = Train(data, b.config, b.profile);
      if (tracing) {
        std::ostringstream text;
        WriteTraceJsonl(TraceTraining(m), text,
                        {{"manifest", ManifestName(out)},
                         {"preset", model_flags.preset},
                         {"model_config", ConfigToJson(m.config)},
                         {"fault_profile", FaultProfileToJson(m.profile)},
                         {"status", ToString(m.status)},
                         {"epsilon_hat", m.epsilon_hat}});
        WriteText(out, text.str());
      } else {
        SaveModel(m, out, {{"manifest", ManifestName(out)}, {"preset", model_flags.preset}});
      }
      manifest.Write(out, seed);
    } else if (generate->parsed()) {
      Manifest manifest("generate", args);
      const PateGanModel m = LoadModel(model_path);
      manifest.Set("config", {{"model", model_path},
                              {"n", n_prime},
                              {"fault_profile", FaultProfileToJson(m.profile)}});
      Rng rng(seed);
      const Dataset synthetic = Generate(m, n_prime, rng);
      std::ostringstream text;
      WriteCsv(synthetic, text);
      WriteText(out, text.str());
      manifest.Write(out, seed);
    } else if (audit->parsed()) {
      const bool worst_case = data_flags.data.empty() && data_flags.desk.empty();
      Dataset data = worst_case ? BuildWorstCase(repeat).data : LoadData(data_flags, seed);
      ModelFlags audit_flags = model_flags;
      if (worst_case) {
        // Tiny model on the crafted dataset: two teachers, 200 iterations.
        if (!audit_flags.teachers) audit_flags.teachers = 2;
        if (!audit_flags.max_iters) audit_flags.max_iters = 200;
      }
      PresetBundle b = ResolveModel(audit_flags, data.num_cols(), data.num_rows(), seed);
      AuditConfig cfg;
      cfg.attack = AttackKindFromString(attack);
      cfg.generator = GeneratorKindFromString(generator);
      cfg.preset = model_flags.preset;
      cfg.model_config = b.config;
      cfg.profile = b.profile;
      cfg.games_per_world = games;
      cfg.train_games = games * 2 / 5;
      cfg.val_games = games / 5;
      cfg.test_games = games - cfg.train_games - cfg.val_games;
      cfg.interval = IntervalMethodFromString(interval);
      cfg.confidence = confidence;
      cfg.synthetic_size = synthetic_size;
      cfg.seed = seed;
      cfg.workers = workers;
      cfg.max_attempts = max_attempts;
      cfg.Validate();

      Manifest manifest("audit", args);
      json target_info;
      RowVector target;
      if (worst_case) {
        target = BuildWorstCase(repeat).target;
        target_info = {{"source", "worst_case"}, {"repeat", repeat}};
      } else if (target_index) {
        if (*target_index >= data.num_rows()) throw ConfigError("--target-index out of range");
        target = data.rows().row(static_cast<Eigen::Index>(*target_index));
        target_info = {{"source", "index"}, {"index", *target_index}};
      } else {
        const TargetSelection sel = SelectTarget(cfg, data, candidates, mini_games, 0.2);
        target = data.rows().row(static_cast<Eigen::Index>(sel.index));
        target_info = {{"source", "selected"},
                       {"index", sel.index},
                       {"auc", sel.auc},
                       {"candidates", sel.candidates},
                       {"candidate_auc", sel.candidate_auc}};
      }
      manifest.Set("config", {{"audit", {{"attack", attack},
                                         {"generator", generator},
                                         {"games_per_world", games},
                                         {"split", {cfg.train_games, cfg.val_games, cfg.test_games}},
                                         {"interval", interval},
                                         {"confidence", confidence},
                                         {"synthetic_size", synthetic_size},
                                         {"workers", workers}}},
                              {"model", ResolvedModel(b, model_flags.preset)},
                              {"target", target_info}});
      const AuditReport report = AuditPipeline(cfg, data, target);
      json j = report.ToJson();
      j["target"] = target_info;
      j["manifest"] = ManifestName(out);
      WriteText(out, j.dump(2) + "\n");
      manifest.Write(out, seed);
    } else if (bench->parsed()) {
      const Dataset data = LoadData(data_flags, seed);
      const size_t n_train = static_cast<size_t>(train_fraction * static_cast<double>(data.num_rows()));
      PresetBundle b = ResolveModel(model_flags, data.num_cols(), n_train, seed);
      BenchConfig cfg;
      cfg.classifiers.clear();
      for (const std::string& k : SplitList(classifiers)) {
        cfg.classifiers.push_back(ClassifierKindFromString(k));
      }
      cfg.epsilons.clear();
      for (const std::string& e : SplitList(epsilons)) cfg.epsilons.push_back(ParseDouble(e));
      cfg.n_models = n_models;
      cfg.n_synth_per_model = n_synth;
      cfg.preset = model_flags.preset;
      cfg.model_config = b.config;
      cfg.profile = b.profile;
      cfg.train_fraction = train_fraction;
      cfg.synthetic_size = bench_synth_size;
      cfg.seed = seed;
      cfg.workers = workers;
      cfg.Validate();

      Manifest manifest("bench", args);
      manifest.Set("config", {{"model", ResolvedModel(b, model_flags.preset)},
                              {"classifiers", SplitList(classifiers)},
                              {"epsilons", cfg.epsilons},
                              {"workers", workers}});
      const BenchReport report = RunBenchmark(cfg, data);
      json j = report.ToJson();
      j["manifest"] = ManifestName(out);
      WriteText(out, j.dump(2) + "\n");
      if (!csv_path.empty()) {
        std::ostringstream table;
        WriteBenchTableCsv({report}, table);
        WriteText(csv_path, table.str());
      }
      manifest.Write(out, seed);
    }
  } catch (const ConfigError& e) {
    Diagnose("config", e.what());
    return 2;
  } catch (const std::exception& e) {
    Diagnose("runtime", e.what());
    return 1;
  }
  return 0;
}

}  // namespace pategan::cli
