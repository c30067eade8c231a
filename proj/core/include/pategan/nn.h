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

// Dense feed-forward networks with hand-written backpropagation, plus SGD,
// Adam and RMSProp. Used for the generator, the teachers, the student and the
// MLP benchmark classifier.

#ifndef PATEGAN_NN_H_
#define PATEGAN_NN_H_

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "pategan/matrix.h"
#include "pategan/rng.h"

namespace pategan {

enum class HiddenActivation { kRelu, kTanh };
enum class OutputActivation { kSigmoid, kIdentity };

// Activations recorded by Mlp::Forward; only valid for the network (and
// parameter version) that produced it.
struct ForwardCache {
  uint64_t net_id = 0;
  uint64_t version = 0;
  std::vector<Matrix> activations;  // [0] is the input, back() the output
};

// Same layout as the network parameters: weights[i] is in x out, biases[i]
// is 1 x out. `input` is d(loss)/d(batch).
struct Gradients {
  std::vector<Matrix> weights;
  std::vector<Matrix> biases;
  Matrix input;

  Gradients& operator*=(double s);
};

class Mlp {
 public:
  // Xavier/Glorot-uniform weights, zero biases. widths = {input, ..., output}.
  static Mlp Create(std::vector<size_t> widths, HiddenActivation hidden,
                    OutputActivation output, Rng& rng);

  Mlp(std::vector<size_t> widths, HiddenActivation hidden,
      OutputActivation output, std::vector<Matrix> weights,
      std::vector<Matrix> biases);

  Mlp(const Mlp& other);
  Mlp& operator=(const Mlp& other);
  Mlp(Mlp&&) noexcept = default;
  Mlp& operator=(Mlp&&) noexcept = default;

  const std::vector<size_t>& widths() const { return widths_; }
  size_t input_width() const { return widths_.front(); }
  size_t output_width() const { return widths_.back(); }
  size_t num_layers() const { return weights_.size(); }
  HiddenActivation hidden_activation() const { return hidden_; }
  OutputActivation output_activation() const { return output_; }

  const std::vector<Matrix>& weights() const { return weights_; }
  const std::vector<Matrix>& biases() const { return biases_; }

  // Outputs only.
  Matrix Predict(const Matrix& batch) const;
  std::pair<Matrix, ForwardCache> Forward(const Matrix& batch) const;
  // output_grad is d(loss)/d(outputs); shapes must match the forward pass.
  Gradients Backward(const ForwardCache& cache, const Matrix& output_grad) const;

  // Interleaved W0, b0, W1, b1, ... for optimizers. Calling this invalidates
  // outstanding caches.
  std::vector<Matrix*> MutableParameters();
  size_t ParameterCount() const;

  nlohmann::json ToJson() const;
  static Mlp FromJson(const nlohmann::json& j);

 private:
  std::vector<size_t> widths_;
  HiddenActivation hidden_;
  OutputActivation output_;
  std::vector<Matrix> weights_;
  std::vector<Matrix> biases_;
  uint64_t id_;
  uint64_t version_ = 0;
};

enum class OptimizerKind { kSgd, kAdam, kRmsProp };

struct OptimizerSettings {
  OptimizerKind kind = OptimizerKind::kAdam;
  double learning_rate = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double rms_decay = 0.9;
  double epsilon = 1e-8;
};

// Per-parameter first/second moment buffers for one parameter set.
class Optimizer {
 public:
  explicit Optimizer(OptimizerSettings settings) : settings_(settings) {}

  const OptimizerSettings& settings() const { return settings_; }
  int64_t step_count() const { return steps_; }

  // Applies one update. Buffers are sized on the first call; later calls
  // must pass the same shapes. Throws TrainingError on non-finite gradients.
  void Step(std::span<Matrix* const> params,
            std::span<const Matrix* const> grads);

  // Convenience for networks: gradient order matches MutableParameters().
  void Step(Mlp& net, const Gradients& grads);

 private:
  OptimizerSettings settings_;
  int64_t steps_ = 0;
  std::vector<Matrix> first_;
  std::vector<Matrix> second_;
};

struct BceResult {
  double loss = 0.0;
  Vector grad;  // d(mean loss)/d(predictions)
};

// Mean binary cross-entropy with predictions clipped to [1e-7, 1 - 1e-7].
// Labels may be soft (in [0, 1]).
BceResult BceLoss(const Vector& predictions, const Vector& labels);

const char* ToString(OptimizerKind kind);
OptimizerKind OptimizerKindFromString(const std::string& name);

}  // namespace pategan

#endif  // PATEGAN_NN_H_
