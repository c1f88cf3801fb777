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

#ifndef OPTIMFORGE_OPTIMIZERS_HPP_
#define OPTIMFORGE_OPTIMIZERS_HPP_

#include <cstdint>
#include <span>
#include <string_view>

#include "optimforge/value.hpp"

namespace optimforge {

struct OptimizerHyperparams {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double lambda = 0.0;  // decoupled weight-decay strength
  double lr = 1e-3;     // peak learning rate
};

// Named momentum buffers plus the AdamW step counter. Lion carries exactly
// one buffer; AdamW exactly two.
struct OptimizerState {
  std::vector<std::pair<std::string, TensorValue>> buffers;
  std::int64_t t = 0;

  static OptimizerState AdamW(const TensorValue& w);
  static OptimizerState Lion(const TensorValue& w);
  static OptimizerState Ablation(const TensorValue& w);

  TensorValue& Buffer(std::string_view name);
  const TensorValue& Buffer(std::string_view name) const;
};

// m <- b1 m + (1-b1) g; v <- b2 v + (1-b2) g^2; bias-corrected;
// w <- w - lr_t (mhat / (sqrt(vhat) + eps) + lambda w).
void AdamWStep(TensorValue& w, const TensorValue& g, OptimizerState& state,
               const OptimizerHyperparams& hp, double lr_t);

// c <- b1 m + (1-b1) g; w <- w - lr_t (sign(c) + lambda w);
// m <- b2 m + (1-b2) g, in this order.
void LionStep(TensorValue& w, const TensorValue& g, OptimizerState& state,
              const OptimizerHyperparams& hp, double lr_t);

// Single-beta sign-momentum ablation: m <- (1-b) g + b m;
// w <- w - lr_t (sign(m) + lambda w).
void AblationStep(TensorValue& w, const TensorValue& g, OptimizerState& state,
                  double beta, double lr_t, double lambda);

// A published (baseline, Lion) hyperparameter pair for one model/task row.
struct OptimizerPreset {
  std::string_view key;
  OptimizerHyperparams baseline;  // AdamW or Adafactor-style
  OptimizerHyperparams lion;
};

// Embedded subset of the published tuning table; every row has both peak lrs
// and both decay strengths.
std::span<const OptimizerPreset> Presets();

// nullptr if the key is not in the subset.
const OptimizerPreset* FindPreset(std::string_view key);

}  // namespace optimforge

#endif  // OPTIMFORGE_OPTIMIZERS_HPP_
