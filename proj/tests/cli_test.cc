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

#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

namespace pategan {
namespace {

namespace fs = std::filesystem;

std::string Slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("pategan_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string P(const std::string& name) const { return (dir_ / name).string(); }

  fs::path dir_;
};

const std::vector<std::string> kTiny = {"--teachers", "2", "--max-iters", "5", "--batch-size", "8"};

std::vector<std::string> With(std::vector<std::string> a, const std::vector<std::string>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

TEST_F(CliTest, UnknownPresetIsConfigError) {
  EXPECT_EQ(cli::Run({"pategan", "train", "--desk", "separable", "--preset", "nope", "--out", P("m.json")}), 2);
  EXPECT_FALSE(fs::exists(P("m.json")));
}

TEST_F(CliTest, MissingOutIsConfigError) {
  EXPECT_EQ(cli::Run({"pategan", "train", "--desk", "separable"}), 2);
}

TEST_F(CliTest, BadEpsilonIsConfigError) {
  EXPECT_EQ(cli::Run(With({"pategan", "train", "--desk", "separable", "--epsilon", "-1", "--out", P("m.json")}, kTiny)), 2);
}

TEST_F(CliTest, MissingDataFileIsRuntimeError) {
  EXPECT_EQ(cli::Run({"pategan", "train", "--data", P("absent.csv"), "--meta", P("absent.json"), "--out", P("m.json")}), 1);
}

TEST_F(CliTest, TrainGenerateDeterministic) {
  for (const char* tag : {"a", "b"}) {
    const std::string m = P(std::string("m_") + tag + ".json");
    ASSERT_EQ(cli::Run(With({"pategan", "train", "--desk", "imbalanced", "--desk-rows", "120",
                             "--seed", "3", "--out", m}, kTiny)), 0);
    ASSERT_EQ(cli::Run({"pategan", "generate", "--model", m, "--n", "25", "--seed", "4", "--out",
                        P(std::string("s_") + tag + ".csv")}), 0);
  }
  const std::string model_a = Slurp(P("m_a.json"));
  const std::string model_b = Slurp(P("m_b.json"));
  EXPECT_NE(model_a.find("m_a.json.manifest.json"), std::string::npos);
  EXPECT_EQ(Slurp(P("s_a.csv")), Slurp(P("s_b.csv")));
  const std::string csv = Slurp(P("s_a.csv"));
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 26);
}

TEST_F(CliTest, ManifestEchoesFlags) {
  ASSERT_EQ(cli::Run(With({"pategan", "trace", "--desk", "separable", "--desk-rows", "80", "--seed", "9",
                           "--out", P("t.jsonl")}, kTiny)), 0);
  const auto manifest = nlohmann::json::parse(Slurp(P("t.jsonl.manifest.json")));
  EXPECT_EQ(manifest["command"], "trace");
  EXPECT_EQ(manifest["seed"], 9);
  EXPECT_EQ(manifest["flags"]["teachers"], "2");
  EXPECT_TRUE(manifest.contains("tool_version"));
  EXPECT_TRUE(manifest.contains("wall_clock_seconds"));
  EXPECT_EQ(manifest["config"]["model_config"]["num_teachers"], 2);
  std::ifstream in(P("t.jsonl"));
  std::string header;
  std::getline(in, header);
  EXPECT_EQ(nlohmann::json::parse(header)["manifest"], "t.jsonl.manifest.json");
}

TEST_F(CliTest, AuditAndBenchDeterministic) {
  for (const char* tag : {"a", "b"}) {
    ASSERT_EQ(cli::Run({"pategan", "audit", "--generator", "verbatim", "--games", "50", "--seed", "2",
                        "--out", P(std::string("audit_") + tag + ".json")}), 0);
    ASSERT_EQ(cli::Run(With({"pategan", "bench", "--desk", "binary3", "--desk-rows", "150", "--models", "1",
                             "--synth", "2", "--seed", "2", "--out", P(std::string("bench_") + tag + ".json"),
                             "--csv", P(std::string("bench_") + tag + ".csv")}, kTiny)), 0);
  }
  // Outputs name their own manifest, so compare after dropping that field.
  auto strip = [](std::string s) {
    auto j = nlohmann::json::parse(s);
    j.erase("manifest");
    return j.dump();
  };
  EXPECT_EQ(strip(Slurp(P("audit_a.json"))), strip(Slurp(P("audit_b.json"))));
  EXPECT_EQ(strip(Slurp(P("bench_a.json"))), strip(Slurp(P("bench_b.json"))));
  EXPECT_EQ(Slurp(P("bench_a.csv")), Slurp(P("bench_b.csv")));
  const auto audit = nlohmann::json::parse(Slurp(P("audit_a.json")));
  EXPECT_TRUE(audit["violation"].get<bool>());
}

}  // namespace
}  // namespace pategan
