// Copyright 2026 The OptimForge Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "optimforge/optimizers.hpp"

#include <array>
#include <cmath>

namespace optimforge {

namespace {

double SignOf(double x) {
  if (std::isnan(x)) return x;
  if (x > 0.0) return 1.0;
  if (x < 0.0) return -1.0;
  return 0.0;
}

// Hyperparameter shorthands for the preset table.
OptimizerHyperparams Base(double lr, double lambda, double beta2 = 0.999,
                          double beta1 = 0.9) {
  OptimizerHyperparams hp;
  hp.beta1 = beta1;
  hp.beta2 = beta2;
  hp.lr = lr;
  hp.lambda = lambda;
  return hp;
}

OptimizerHyperparams LionHp(double lr, double lambda, double beta1 = 0.9,
                            double beta2 = 0.99) {
  OptimizerHyperparams hp;
  hp.beta1 = beta1;
  hp.beta2 = beta2;
  hp.lr = lr;
  hp.lambda = lambda;
  return hp;
}

// The published tuning-table rows for which both the peak lr and the decay
// strength are available for baseline and Lion. Rows with an unpublished
// decay, and the rows whose published pair falls outside the 3-10x lr /
// matched-effective-decay relationship, are not embedded.
const std::array<OptimizerPreset, 17> kPresets = {{
    {"resnet50-imagenet", Base(3e-3, 0.1), LionHp(3e-4, 1.0)},
    {"mixer-s16-imagenet", Base(1e-2, 0.3), LionHp(3e-3, 1.0)},
    {"mixer-b16-imagenet", Base(1e-2, 0.3), LionHp(3e-3, 3.0)},
    {"vit-s16-imagenet", Base(1e-2, 0.1), LionHp(1e-3, 1.0)},
    {"vit-s16-imagenet-aug", Base(3e-3, 0.1), LionHp(3e-4, 1.0)},
    {"vit-b16-imagenet", Base(3e-3, 0.3), LionHp(1e-3, 1.0)},
    {"vit-b16-imagenet-aug", Base(1e-3, 1.0), LionHp(1e-4, 10.0)},
    {"vit-b16-i21k", Base(1e-3, 0.1), LionHp(1e-4, 0.3)},
    {"vit-l16-i21k", Base(1e-3, 0.3), LionHp(1e-4, 1.0)},
    {"vit-b16-jft", Base(6e-4, 0.1), LionHp(1e-4, 0.3)},
    {"vit-l16-jft", Base(3e-4, 0.1), LionHp(1e-4, 0.3)},
    {"vit-h14-jft", Base(3e-4, 0.1), LionHp(3e-5, 0.3)},
    {"lit-g14-l", Base(1e-3, 0.1), LionHp(2e-4, 0.5)},
    {"diffusion", Base(3e-4, 0.01), LionHp(3e-5, 0.1)},
    {"lm-medium-wiki40b", Base(3e-3, 0.001, 0.99), LionHp(3e-4, 0.01, 0.95, 0.98)},
    {"lm-1.1b", Base(2e-3, 0.0005, 0.99), LionHp(2e-4, 0.005, 0.95, 0.98)},
    {"lm-7.5b", Base(1e-3, 0.001, 0.99), LionHp(1e-4, 0.01, 0.95, 0.98)},
}};

}  // namespace

OptimizerState OptimizerState::AdamW(const TensorValue& w) {
  OptimizerState s;
  s.buffers.emplace_back("m", TensorValue::ZerosLike(w));
  s.buffers.emplace_back("v", TensorValue::ZerosLike(w));
  return s;
}

OptimizerState OptimizerState::Lion(const TensorValue& w) {
  OptimizerState s;
  s.buffers.emplace_back("m", TensorValue::ZerosLike(w));
  return s;
}

OptimizerState OptimizerState::Ablation(const TensorValue& w) {
  return Lion(w);
}

TensorValue& OptimizerState::Buffer(std::string_view name) {
  for (auto& [key, value] : buffers)
    if (key == name) return value;
  throw ValueError("no optimizer buffer named '" + std::string(name) + "'");
}

const TensorValue& OptimizerState::Buffer(std::string_view name) const {
  for (const auto& [key, value] : buffers)
    if (key == name) return value;
  throw ValueError("no optimizer buffer named '" + std::string(name) + "'");
}

void AdamWStep(TensorValue& w, const TensorValue& g, OptimizerState& state,
               const OptimizerHyperparams& hp, double lr_t) {
  state.t += 1;
  TensorValue& m = state.Buffer("m");
  TensorValue& v = state.Buffer("v");
  const double b1 = hp.beta1;
  const double b2 = hp.beta2;
  m = BinaryMap(m, g, [&](double mi, double gi) { return b1 * mi + (1.0 - b1) * gi; });
  v = BinaryMap(v, g, [&](double vi, double gi) { return b2 * vi + (1.0 - b2) * gi * gi; });
  const double mc = 1.0 - std::pow(b1, static_cast<double>(state.t));
  const double vc = 1.0 - std::pow(b2, static_cast<double>(state.t));
  const TensorValue dir = BinaryMap(m, v, [&](double mi, double vi) {
    return (mi / mc) / (std::sqrt(vi / vc) + hp.eps);
  });
  w = BinaryMap(w, dir, [&](double wi, double di) {
    return wi - lr_t * (di + hp.lambda * wi);
  });
}

void LionStep(TensorValue& w, const TensorValue& g, OptimizerState& state,
              const OptimizerHyperparams& hp, double lr_t) {
  TensorValue& m = state.Buffer("m");
  const double b1 = hp.beta1;
  const double b2 = hp.beta2;
  const TensorValue c =
      BinaryMap(m, g, [&](double mi, double gi) { return b1 * mi + (1.0 - b1) * gi; });
  w = BinaryMap(w, c, [&](double wi, double ci) {
    return wi - lr_t * (SignOf(ci) + hp.lambda * wi);
  });
  m = BinaryMap(m, g, [&](double mi, double gi) { return b2 * mi + (1.0 - b2) * gi; });
}

void AblationStep(TensorValue& w, const TensorValue& g, OptimizerState& state,
                  double beta, double lr_t, double lambda) {
  TensorValue& m = state.Buffer("m");
  m = BinaryMap(g, m, [&](double gi, double mi) { return (1.0 - beta) * gi + beta * mi; });
  w = BinaryMap(w, m, [&](double wi, double mi) {
    return wi - lr_t * (SignOf(mi) + lambda * wi);
  });
}

std::span<const OptimizerPreset> Presets() { return kPresets; }

const OptimizerPreset* FindPreset(std::string_view key) {
  for (const OptimizerPreset& preset : kPresets)
    if (preset.key == key) return &preset;
  return nullptr;
}

}  // namespace optimforge
