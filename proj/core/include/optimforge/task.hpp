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

#ifndef OPTIMFORGE_TASK_HPP_
#define OPTIMFORGE_TASK_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "optimforge/abstract.hpp"
#include "optimforge/program.hpp"
#include "optimforge/value.hpp"

namespace optimforge {

struct ScheduleSpec {
  double peak_lr = 1e-3;
  double warmup_fraction = 0.1;
  enum class Shape { kCosine, kConstant } shape = Shape::kCosine;

  friend bool operator==(const ScheduleSpec&, const ScheduleSpec&) = default;
};

// Linear warmup from 0 to peak over the warmup fraction, then cosine decay to
// 0 at total_steps (or flat peak for a constant schedule).
double Schedule(int step, int total_steps, const ScheduleSpec& spec);

// A fully seeded desk-scale training problem. Two equal specs define
// identical fitness functions.
struct ProxyTask {
  std::string task_id;
  // Dataset generator: "linreg" (least squares), "blobs" (Gaussian-blob
  // classification), "quadratic" (data-free convex quadratic).
  std::string dataset = "linreg";
  std::uint64_t data_seed = 1;
  int train_size = 256;
  int val_size = 256;
  // Layer widths including input and output; size 2 means a linear model.
  std::vector<int> widths = {100, 1};
  std::string activation = "tanh";
  int steps = 2000;
  int batch_size = 32;
  ScheduleSpec schedule;
  enum class Metric { kValAccuracy, kNegValLoss } metric = Metric::kNegValLoss;
  double timeout_seconds = 600.0;
  // Curvature of the quadratic dataset's loss 0.5*lambda*|w|^2.
  double quadratic_lambda = 0.1;

  friend bool operator==(const ProxyTask&, const ProxyTask&) = default;
};

std::string TaskToJson(const ProxyTask& task);
ProxyTask TaskFromJson(std::string_view json_text);

// Built-in task ids: "linreg", "mlp-blobs", "quadratic". Throws ValueError on
// unknown ids.
ProxyTask BuiltinTask(std::string_view task_id);

// Meta-validation ladder: 'A' = the task itself, 'B' = 10x steps + 2x hidden
// width, 'C' = 100x steps + 4x hidden width.
ProxyTask ScaleTask(const ProxyTask& task, char level);

// Materialized dataset: row-major inputs plus regression targets or class
// labels.
struct Dataset {
  int input_dim = 0;
  int num_classes = 0;  // 0 for regression
  std::vector<double> train_x, val_x;
  std::vector<double> train_y, val_y;  // regression targets
  std::vector<int> train_label, val_label;
};

Dataset MakeDataset(const ProxyTask& task);

// Weight tree for the task's model, deterministically initialized.
TensorValue InitWeights(const ProxyTask& task, std::uint64_t seed);

// The abstract signature programs must satisfy for this task.
InputSignature TaskSignature(const ProxyTask& task);

// Softmax cross-entropy (classification) or half mean squared error
// (regression) over rows [begin, begin+count) of the given split, with exact
// hand-coded gradients for every weight leaf. Row indices wrap around.
struct ForwardBackwardResult {
  double loss = 0.0;
  TensorValue grads;
};
ForwardBackwardResult ForwardBackward(const ProxyTask& task, const Dataset& data,
                                      const TensorValue& weights, bool validation,
                                      int begin, int count);

struct Fitness {
  enum class Status { kOk, kNonfinite, kTimeout };
  double value = 0.0;
  Status status = Status::kOk;
};

const char* StatusName(Fitness::Status s);

// Strict weak order, best first is max: every ok fitness beats every non-ok
// one; ok fitnesses compare by value.
bool FitnessLess(const Fitness& a, const Fitness& b);

// Runs the training loop of the program interpreter: w starts from seed,
// m=v=0; per step lr = Schedule, (loss, g) = ForwardBackward, program
// executes, w <- w - update. Non-finite loss/weights abort with
// status=nonfinite; exceeding the task timeout gives status=timeout. All
// other failures (runtime shape errors from flow-divergent m/v) also map to
// nonfinite.
Fitness EvaluateFitness(const Program& p, const ProxyTask& task,
                        std::uint64_t seed);

// EvaluateFitness on the scaled ladder task.
Fitness MetaValidate(const Program& p, const ProxyTask& task, char level,
                     std::uint64_t seed);

struct FunnelResult {
  std::vector<char> levels;
  std::vector<Fitness> baseline;                  // per level
  std::vector<std::vector<std::size_t>> survivors;  // candidate indices per level
  std::vector<std::vector<Fitness>> fitness;      // parallel to survivors
};

// Ladder filter: at each level, candidates surviving the previous level are
// kept iff strictly fitter than the baseline at this level.
FunnelResult FunnelSelect(const std::vector<Program>& candidates,
                          const Program& baseline, const ProxyTask& task,
                          const std::vector<char>& levels, std::uint64_t seed,
                          int threads = 1);

// Mean training loss at w + eps over `draws` Gaussian perturbations of
// per-coordinate std sigma.
double Flatness(const TensorValue& weights, const ProxyTask& task,
                double sigma, int draws, std::uint64_t seed);

// Training loss over the full training split.
double TrainLoss(const ProxyTask& task, const Dataset& data,
                 const TensorValue& weights);

}  // namespace optimforge

#endif  // OPTIMFORGE_TASK_HPP_
