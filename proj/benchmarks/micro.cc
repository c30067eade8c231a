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

#include <vector>

#include <benchmark/benchmark.h>

#include "pategan/classifiers.h"
#include "pategan/dp_mech.h"
#include "pategan/metrics.h"
#include "pategan/nn.h"
#include "pategan/rng.h"

namespace pategan {
namespace {

void BM_AccountantUpdate(benchmark::State& state) {
  AccountantSettings s;
  s.lambda = 1e-3;
  s.num_moments = static_cast<int>(state.range(0));
  s.delta = 1e-5;
  MomentsAccountant acc(s);
  const VoteTally t{2, 3};
  for (auto _ : state) {
    acc.Update(t);
    benchmark::DoNotOptimize(acc.Epsilon());
  }
}
BENCHMARK(BM_AccountantUpdate)->Arg(20)->Arg(100);

void BM_MlpForwardBackward(benchmark::State& state) {
  const auto d = static_cast<size_t>(state.range(0));
  Rng rng(1);
  Mlp net = Mlp::Create({d, d, d, 1}, HiddenActivation::kRelu,
                        OutputActivation::kSigmoid, rng);
  Matrix x(64, static_cast<Eigen::Index>(d));
  for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = rng.Uniform();
  Matrix upstream = Matrix::Constant(64, 1, 1.0 / 64);
  for (auto _ : state) {
    auto [out, cache] = net.Forward(x);
    benchmark::DoNotOptimize(out.data());
    Gradients g = net.Backward(cache, upstream);
    benchmark::DoNotOptimize(g.input.data());
  }
}
BENCHMARK(BM_MlpForwardBackward)->Arg(8)->Arg(64);

void BM_RandomForestFit(benchmark::State& state) {
  Rng rng(2);
  const Eigen::Index n = state.range(0);
  Matrix x(n, 8);
  Vector y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < 8; ++j) x(i, j) = rng.Normal();
    y[i] = x(i, 0) + 0.5 * rng.Normal() > 0 ? 1.0 : 0.0;
  }
  ClassifierOptions opts;
  opts.forest_trees = 100;
  for (auto _ : state) {
    TrainedClassifier c = FitClassifier(ClassifierKind::kRandomForest, x, y, opts, 3);
    benchmark::DoNotOptimize(&c);
  }
}
BENCHMARK(BM_RandomForestFit)->Arg(800)->Unit(benchmark::kMillisecond);

void BM_Auroc(benchmark::State& state) {
  Rng rng(4);
  const Eigen::Index n = state.range(0);
  Vector y(n);
  Vector s(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    y[i] = rng.Uniform() < 0.5 ? 1.0 : 0.0;
    s[i] = rng.Uniform();
  }
  for (auto _ : state) benchmark::DoNotOptimize(Auroc(y, s).value);
}
BENCHMARK(BM_Auroc)->Arg(1000)->Arg(100000);

}  // namespace
}  // namespace pategan

BENCHMARK_MAIN();
