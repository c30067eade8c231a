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

#include "pategan/nn.h"

#include <algorithm>
#include <atomic>
#include <cmath>

#include "pategan/errors.h"

namespace pategan {
namespace {

constexpr double kProbClip = 1e-7;

uint64_t NextNetId() {
  static std::atomic<uint64_t> counter{1};
  return counter.fetch_add(1, std::memory_order_relaxed);
}

void ApplyHidden(HiddenActivation act, Matrix& z) {
  if (act == HiddenActivation::kRelu) {
    z = z.cwiseMax(0.0);
  } else {
    z = z.array().tanh().matrix();
  }
}

void ApplyOutput(OutputActivation act, Matrix& z) {
  if (act == OutputActivation::kSigmoid) {
    z = (1.0 / (1.0 + (-z.array()).exp())).matrix();
  }
}

}  // namespace

Gradients& Gradients::operator*=(double s) {
  for (auto& w : weights) w *= s;
  for (auto& b : biases) b *= s;
  input *= s;
  return *this;
}

Mlp Mlp::Create(std::vector<size_t> widths, HiddenActivation hidden,
                OutputActivation output, Rng& rng) {
  if (widths.size() < 2) throw ConfigError("network needs input and output widths");
  std::vector<Matrix> weights;
  std::vector<Matrix> biases;
  for (size_t i = 0; i + 1 < widths.size(); ++i) {
    const size_t in = widths[i];
    const size_t out = widths[i + 1];
    const double limit = std::sqrt(6.0 / static_cast<double>(in + out));
    Matrix w(in, out);
    for (Eigen::Index r = 0; r < w.rows(); ++r) {
      for (Eigen::Index c = 0; c < w.cols(); ++c) {
        w(r, c) = (2.0 * rng.Uniform() - 1.0) * limit;
      }
    }
    weights.push_back(std::move(w));
    biases.push_back(Matrix::Zero(1, out));
  }
  return Mlp(std::move(widths), hidden, output, std::move(weights),
             std::move(biases));
}

Mlp::Mlp(std::vector<size_t> widths, HiddenActivation hidden,
         OutputActivation output, std::vector<Matrix> weights,
         std::vector<Matrix> biases)
    : widths_(std::move(widths)),
      hidden_(hidden),
      output_(output),
      weights_(std::move(weights)),
      biases_(std::move(biases)),
      id_(NextNetId()) {
  if (widths_.size() < 2) throw ConfigError("network needs input and output widths");
  if (weights_.size() + 1 != widths_.size() || biases_.size() != weights_.size()) {
    throw ConfigError("layer count does not match widths");
  }
  for (size_t i = 0; i < weights_.size(); ++i) {
    if (widths_[i] == 0 || widths_[i + 1] == 0) {
      throw ConfigError("layer widths must be positive");
    }
    if (static_cast<size_t>(weights_[i].rows()) != widths_[i] ||
        static_cast<size_t>(weights_[i].cols()) != widths_[i + 1] ||
        biases_[i].rows() != 1 ||
        static_cast<size_t>(biases_[i].cols()) != widths_[i + 1]) {
      throw ConfigError("parameter shape does not match layer widths");
    }
    if (!weights_[i].allFinite() || !biases_[i].allFinite()) {
      throw ConfigError("non-finite network parameter");
    }
  }
}

Mlp::Mlp(const Mlp& other)
    : widths_(other.widths_),
      hidden_(other.hidden_),
      output_(other.output_),
      weights_(other.weights_),
      biases_(other.biases_),
      id_(NextNetId()) {}

Mlp& Mlp::operator=(const Mlp& other) {
  if (this != &other) {
    widths_ = other.widths_;
    hidden_ = other.hidden_;
    output_ = other.output_;
    weights_ = other.weights_;
    biases_ = other.biases_;
    id_ = NextNetId();
    version_ = 0;
  }
  return *this;
}

Matrix Mlp::Predict(const Matrix& batch) const { return Forward(batch).first; }

std::pair<Matrix, ForwardCache> Mlp::Forward(const Matrix& batch) const {
  if (static_cast<size_t>(batch.cols()) != input_width()) {
    throw ConfigError("batch width " + std::to_string(batch.cols()) +
                      " does not match network input width " +
                      std::to_string(input_width()));
  }
  if (!batch.allFinite()) throw TrainingError("non-finite network input");
  ForwardCache cache;
  cache.net_id = id_;
  cache.version = version_;
  cache.activations.reserve(weights_.size() + 1);
  cache.activations.push_back(batch);
  for (size_t i = 0; i < weights_.size(); ++i) {
    Matrix z = cache.activations.back() * weights_[i];
    z.rowwise() += biases_[i].row(0);
    if (i + 1 < weights_.size()) {
      ApplyHidden(hidden_, z);
    } else {
      ApplyOutput(output_, z);
    }
    cache.activations.push_back(std::move(z));
  }
  Matrix out = cache.activations.back();
  return {std::move(out), std::move(cache)};
}

Gradients Mlp::Backward(const ForwardCache& cache,
                        const Matrix& output_grad) const {
  if (cache.net_id != id_ || cache.version != version_ ||
      cache.activations.size() != weights_.size() + 1) {
    throw ConfigError("stale or mismatched forward cache");
  }
  const Matrix& out = cache.activations.back();
  if (output_grad.rows() != out.rows() || output_grad.cols() != out.cols()) {
    throw ConfigError("output gradient shape does not match forward outputs");
  }
  Gradients g;
  g.weights.resize(weights_.size());
  g.biases.resize(weights_.size());

  // delta = d(loss)/d(pre-activation) of the current layer.
  Matrix delta = output_grad;
  if (output_ == OutputActivation::kSigmoid) {
    delta.array() *= out.array() * (1.0 - out.array());
  }
  for (size_t i = weights_.size(); i-- > 0;) {
    const Matrix& in = cache.activations[i];
    g.weights[i] = in.transpose() * delta;
    g.biases[i] = delta.colwise().sum();
    Matrix upstream = delta * weights_[i].transpose();
    if (i > 0) {
      if (hidden_ == HiddenActivation::kRelu) {
        upstream.array() *= (in.array() > 0.0).cast<double>();
      } else {
        upstream.array() *= 1.0 - in.array().square();
      }
    }
    delta = std::move(upstream);
  }
  g.input = std::move(delta);
  return g;
}

std::vector<Matrix*> Mlp::MutableParameters() {
  ++version_;
  std::vector<Matrix*> params;
  params.reserve(2 * weights_.size());
  for (size_t i = 0; i < weights_.size(); ++i) {
    params.push_back(&weights_[i]);
    params.push_back(&biases_[i]);
  }
  return params;
}

size_t Mlp::ParameterCount() const {
  size_t n = 0;
  for (size_t i = 0; i < weights_.size(); ++i) {
    n += weights_[i].size() + biases_[i].size();
  }
  return n;
}

nlohmann::json Mlp::ToJson() const {
  nlohmann::json layers = nlohmann::json::array();
  for (size_t i = 0; i < weights_.size(); ++i) {
    std::vector<double> w(weights_[i].data(),
                          weights_[i].data() + weights_[i].size());
    std::vector<double> b(biases_[i].data(),
                          biases_[i].data() + biases_[i].size());
    layers.push_back({{"weights", w}, {"bias", b}});
  }
  return {{"format", "pategan-mlp"},
          {"version", 1},
          {"widths", widths_},
          {"hidden", hidden_ == HiddenActivation::kRelu ? "relu" : "tanh"},
          {"output", output_ == OutputActivation::kSigmoid ? "sigmoid"
                                                           : "identity"},
          {"layers", layers}};
}

Mlp Mlp::FromJson(const nlohmann::json& j) {
  try {
    if (j.at("format") != "pategan-mlp" || j.at("version") != 1) {
      throw ConfigError("unsupported network format");
    }
    auto widths = j.at("widths").get<std::vector<size_t>>();
    const std::string hidden = j.at("hidden").get<std::string>();
    const std::string output = j.at("output").get<std::string>();
    std::vector<Matrix> weights;
    std::vector<Matrix> biases;
    const auto& layers = j.at("layers");
    if (widths.size() < 2 || layers.size() + 1 != widths.size()) {
      throw ConfigError("layer count does not match widths");
    }
    for (size_t i = 0; i < layers.size(); ++i) {
      auto w = layers[i].at("weights").get<std::vector<double>>();
      auto b = layers[i].at("bias").get<std::vector<double>>();
      if (w.size() != widths[i] * widths[i + 1] || b.size() != widths[i + 1]) {
        throw ConfigError("parameter array size does not match widths");
      }
      weights.push_back(Eigen::Map<Matrix>(w.data(), widths[i], widths[i + 1]));
      biases.push_back(Eigen::Map<Matrix>(b.data(), 1, widths[i + 1]));
    }
    return Mlp(std::move(widths),
               hidden == "relu" ? HiddenActivation::kRelu : HiddenActivation::kTanh,
               output == "sigmoid" ? OutputActivation::kSigmoid
                                   : OutputActivation::kIdentity,
               std::move(weights), std::move(biases));
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed network: ") + e.what());
  }
}

void Optimizer::Step(std::span<Matrix* const> params,
                     std::span<const Matrix* const> grads) {
  if (params.size() != grads.size()) {
    throw ConfigError("optimizer: parameter and gradient counts differ");
  }
  for (size_t i = 0; i < params.size(); ++i) {
    if (params[i]->rows() != grads[i]->rows() ||
        params[i]->cols() != grads[i]->cols()) {
      throw ConfigError("optimizer: gradient shape mismatch");
    }
    if (!grads[i]->allFinite()) throw TrainingError("non-finite gradient");
  }
  if (steps_ == 0) {
    first_.clear();
    second_.clear();
    for (const Matrix* p : params) {
      first_.push_back(Matrix::Zero(p->rows(), p->cols()));
      second_.push_back(Matrix::Zero(p->rows(), p->cols()));
    }
  } else if (first_.size() != params.size()) {
    throw ConfigError("optimizer: parameter set changed between steps");
  }
  ++steps_;
  const double lr = settings_.learning_rate;
  const double eps = settings_.epsilon;
  switch (settings_.kind) {
    case OptimizerKind::kSgd:
      for (size_t i = 0; i < params.size(); ++i) *params[i] -= lr * *grads[i];
      break;
    case OptimizerKind::kAdam: {
      const double b1 = settings_.beta1;
      const double b2 = settings_.beta2;
      const double c1 = 1.0 - std::pow(b1, static_cast<double>(steps_));
      const double c2 = 1.0 - std::pow(b2, static_cast<double>(steps_));
      for (size_t i = 0; i < params.size(); ++i) {
        first_[i] = b1 * first_[i] + (1.0 - b1) * *grads[i];
        second_[i].array() =
            b2 * second_[i].array() + (1.0 - b2) * grads[i]->array().square();
        params[i]->array() -= lr * (first_[i].array() / c1) /
                              ((second_[i].array() / c2).sqrt() + eps);
      }
      break;
    }
    case OptimizerKind::kRmsProp: {
      const double rho = settings_.rms_decay;
      for (size_t i = 0; i < params.size(); ++i) {
        second_[i].array() =
            rho * second_[i].array() + (1.0 - rho) * grads[i]->array().square();
        params[i]->array() -=
            lr * grads[i]->array() / (second_[i].array().sqrt() + eps);
      }
      break;
    }
  }
}

void Optimizer::Step(Mlp& net, const Gradients& grads) {
  if (grads.weights.size() != net.num_layers()) {
    throw ConfigError("optimizer: gradient layer count mismatch");
  }
  std::vector<const Matrix*> g;
  g.reserve(2 * grads.weights.size());
  for (size_t i = 0; i < grads.weights.size(); ++i) {
    g.push_back(&grads.weights[i]);
    g.push_back(&grads.biases[i]);
  }
  std::vector<Matrix*> p = net.MutableParameters();
  Step(p, g);
}

BceResult BceLoss(const Vector& predictions, const Vector& labels) {
  if (predictions.size() != labels.size()) {
    throw ConfigError("BceLoss: length mismatch");
  }
  const Eigen::Index n = predictions.size();
  if (n == 0) return {0.0, Vector()};
  BceResult r;
  r.grad.resize(n);
  double total = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double p = std::clamp(predictions[i], kProbClip, 1.0 - kProbClip);
    const double y = labels[i];
    total -= y * std::log(p) + (1.0 - y) * std::log(1.0 - p);
    // Zero gradient where the clip is active (the clipped loss is flat there).
    const bool clipped = predictions[i] < kProbClip || predictions[i] > 1.0 - kProbClip;
    r.grad[i] = clipped ? 0.0 : (-y / p + (1.0 - y) / (1.0 - p)) / static_cast<double>(n);
  }
  r.loss = total / static_cast<double>(n);
  return r;
}

const char* ToString(OptimizerKind kind) {
  switch (kind) {
    case OptimizerKind::kSgd:
      return "sgd";
    case OptimizerKind::kAdam:
      return "adam";
    case OptimizerKind::kRmsProp:
      return "rmsprop";
  }
  return "?";
}

OptimizerKind OptimizerKindFromString(const std::string& name) {
  if (name == "sgd") return OptimizerKind::kSgd;
  if (name == "adam") return OptimizerKind::kAdam;
  if (name == "rmsprop") return OptimizerKind::kRmsProp;
  throw ConfigError("unknown optimizer '" + name + "'");
}

}  // namespace pategan
