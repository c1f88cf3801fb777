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

#include "optimforge/task.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <limits>
#include <numbers>
#include <thread>

#include "json.hpp"

#include "optimforge/rng.hpp"

namespace optimforge {

double Schedule(int step, int total_steps, const ScheduleSpec& spec) {
  const int warmup = static_cast<int>(
      std::lround(spec.warmup_fraction * static_cast<double>(total_steps)));
  // step+1 so the first update already trains with a small positive rate
  // (an exactly-zero rate would zero out gradient-clipped programs).
  if (step < warmup)
    return spec.peak_lr * static_cast<double>(step + 1) /
           static_cast<double>(warmup);
  if (spec.shape == ScheduleSpec::Shape::kConstant) return spec.peak_lr;
  const double progress = static_cast<double>(step - warmup) /
                          static_cast<double>(total_steps - warmup);
  return spec.peak_lr * 0.5 * (1.0 + std::cos(std::numbers::pi * progress));
}

namespace {

bool IsClassification(const ProxyTask& task) { return task.dataset == "blobs"; }
bool IsQuadratic(const ProxyTask& task) { return task.dataset == "quadratic"; }

std::string ShapeName(ScheduleSpec::Shape s) {
  return s == ScheduleSpec::Shape::kCosine ? "cosine" : "constant";
}

std::string MetricName(ProxyTask::Metric m) {
  return m == ProxyTask::Metric::kValAccuracy ? "val_accuracy" : "neg_val_loss";
}

void AddNoise(TensorValue& v, double sigma, Rng& rng) {
  switch (v.kind()) {
    case TensorValue::Kind::kScalar:
      v = TensorValue::Scalar(v.scalar() + sigma * rng.Normal());
      return;
    case TensorValue::Kind::kArray:
      for (double& x : v.mutable_data()) x += sigma * rng.Normal();
      return;
    case TensorValue::Kind::kTree:
      for (auto& [key, child] : v.mutable_children()) AddNoise(child, sigma, rng);
      return;
  }
}

// Forward pass of the tanh MLP, keeping activations for backprop. Row-major
// matrices; W_l has shape {in, out}.
struct MlpPass {
  std::vector<std::vector<double>> acts;  // acts[0] = inputs, acts.back() = logits
};

void MlpForward(const ProxyTask& task, const TensorValue& weights,
                const std::vector<double>& x, int rows, MlpPass& pass) {
  const std::size_t layers = task.widths.size() - 1;
  pass.acts.assign(layers + 1, {});
  pass.acts[0] = x;
  for (std::size_t l = 1; l <= layers; ++l) {
    const int in = task.widths[l - 1];
    const int out = task.widths[l];
    const TensorValue* W = weights.Find("w" + std::to_string(l));
    const TensorValue* b = weights.Find("b" + std::to_string(l));
    std::vector<double>& z = pass.acts[l];
    z.assign(static_cast<std::size_t>(rows) * out, 0.0);
    const std::vector<double>& a = pass.acts[l - 1];
    for (int r = 0; r < rows; ++r) {
      const double* arow = a.data() + static_cast<std::size_t>(r) * in;
      double* zrow = z.data() + static_cast<std::size_t>(r) * out;
      for (int j = 0; j < out; ++j) zrow[j] = b->data()[j];
      for (int i = 0; i < in; ++i) {
        const double ai = arow[i];
        const double* wrow = W->data().data() + static_cast<std::size_t>(i) * out;
        for (int j = 0; j < out; ++j) zrow[j] += ai * wrow[j];
      }
      if (l < layers)
        for (int j = 0; j < out; ++j) zrow[j] = std::tanh(zrow[j]);
    }
  }
}

// Mean softmax cross-entropy over the rows; writes softmax-minus-onehot (already
// divided by rows) into dlogits when it is non-null.
double SoftmaxLoss(const std::vector<double>& logits, const int* labels,
                   int rows, int classes, std::vector<double>* dlogits) {
  double loss = 0.0;
  if (dlogits != nullptr)
    dlogits->assign(static_cast<std::size_t>(rows) * classes, 0.0);
  for (int r = 0; r < rows; ++r) {
    const double* row = logits.data() + static_cast<std::size_t>(r) * classes;
    double zmax = row[0];
    for (int j = 1; j < classes; ++j) zmax = std::max(zmax, row[j]);
    double denom = 0.0;
    for (int j = 0; j < classes; ++j) denom += std::exp(row[j] - zmax);
    // Keep everything in shifted coordinates: adding zmax back and
    // subtracting row[label] absorbs log(denom) entirely once |logits|
    // reaches ~1e300, reporting exactly-zero loss for a uniform prediction.
    loss += std::log(denom) - (row[labels[r]] - zmax);
    if (dlogits != nullptr) {
      double* drow = dlogits->data() + static_cast<std::size_t>(r) * classes;
      for (int j = 0; j < classes; ++j)
        drow[j] = std::exp(row[j] - zmax) / denom / rows;
      drow[labels[r]] -= 1.0 / rows;
    }
  }
  return loss / rows;
}

// Gathers `count` rows starting at `begin` with wraparound.
void GatherRows(const std::vector<double>& x, int dim, int n, int begin,
                int count, std::vector<double>& out_x,
                const std::vector<int>* labels, std::vector<int>* out_labels,
                const std::vector<double>* targets,
                std::vector<double>* out_targets) {
  out_x.resize(static_cast<std::size_t>(count) * dim);
  if (out_labels != nullptr) out_labels->resize(count);
  if (out_targets != nullptr) out_targets->resize(count);
  for (int i = 0; i < count; ++i) {
    const int idx = (begin + i) % n;
    std::copy_n(x.data() + static_cast<std::size_t>(idx) * dim, dim,
                out_x.data() + static_cast<std::size_t>(i) * dim);
    if (out_labels != nullptr) (*out_labels)[i] = (*labels)[idx];
    if (out_targets != nullptr) (*out_targets)[i] = (*targets)[idx];
  }
}

}  // namespace

std::string TaskToJson(const ProxyTask& task) {
  nlohmann::json doc;
  doc["task_id"] = task.task_id;
  doc["dataset"] = task.dataset;
  doc["data_seed"] = task.data_seed;
  doc["train_size"] = task.train_size;
  doc["val_size"] = task.val_size;
  doc["widths"] = task.widths;
  doc["activation"] = task.activation;
  doc["steps"] = task.steps;
  doc["batch_size"] = task.batch_size;
  doc["schedule"] = {{"peak_lr", task.schedule.peak_lr},
                     {"warmup_fraction", task.schedule.warmup_fraction},
                     {"shape", ShapeName(task.schedule.shape)}};
  doc["metric"] = MetricName(task.metric);
  doc["timeout_seconds"] = task.timeout_seconds;
  doc["quadratic_lambda"] = task.quadratic_lambda;
  return doc.dump(2);
}

ProxyTask TaskFromJson(std::string_view json_text) {
  const nlohmann::json doc = nlohmann::json::parse(json_text);
  ProxyTask task;
  task.task_id = doc.at("task_id").get<std::string>();
  task.dataset = doc.at("dataset").get<std::string>();
  task.data_seed = doc.at("data_seed").get<std::uint64_t>();
  task.train_size = doc.at("train_size").get<int>();
  task.val_size = doc.at("val_size").get<int>();
  task.widths = doc.at("widths").get<std::vector<int>>();
  task.activation = doc.at("activation").get<std::string>();
  task.steps = doc.at("steps").get<int>();
  task.batch_size = doc.at("batch_size").get<int>();
  const auto& sched = doc.at("schedule");
  task.schedule.peak_lr = sched.at("peak_lr").get<double>();
  task.schedule.warmup_fraction = sched.at("warmup_fraction").get<double>();
  task.schedule.shape = sched.at("shape").get<std::string>() == "constant"
                            ? ScheduleSpec::Shape::kConstant
                            : ScheduleSpec::Shape::kCosine;
  task.metric = doc.at("metric").get<std::string>() == "val_accuracy"
                    ? ProxyTask::Metric::kValAccuracy
                    : ProxyTask::Metric::kNegValLoss;
  task.timeout_seconds = doc.at("timeout_seconds").get<double>();
  if (doc.contains("quadratic_lambda"))
    task.quadratic_lambda = doc.at("quadratic_lambda").get<double>();
  return task;
}

ProxyTask BuiltinTask(std::string_view task_id) {
  ProxyTask task;
  if (task_id == "linreg") {
    task.task_id = "linreg";
    task.dataset = "linreg";
    task.data_seed = 17;
    task.train_size = 256;
    task.val_size = 256;
    task.widths = {100, 1};
    task.steps = 2000;
    task.batch_size = 32;
    task.schedule.peak_lr = 1.0;
    task.metric = ProxyTask::Metric::kNegValLoss;
    return task;
  }
  if (task_id == "mlp-blobs") {
    task.task_id = "mlp-blobs";
    task.dataset = "blobs";
    task.data_seed = 29;
    task.train_size = 1000;
    task.val_size = 1000;
    task.widths = {2, 32, 32, 4};
    task.steps = 500;
    task.batch_size = 64;
    task.schedule.peak_lr = 1.0;
    task.metric = ProxyTask::Metric::kValAccuracy;
    return task;
  }
  if (task_id == "quadratic") {
    task.task_id = "quadratic";
    task.dataset = "quadratic";
    task.data_seed = 5;
    task.train_size = 1;
    task.val_size = 1;
    task.widths = {100, 1};
    task.steps = 200;
    task.batch_size = 1;
    task.schedule.peak_lr = 0.05;
    task.metric = ProxyTask::Metric::kNegValLoss;
    return task;
  }
  throw ValueError("unknown task id '" + std::string(task_id) + "'");
}

ProxyTask ScaleTask(const ProxyTask& task, char level) {
  ProxyTask scaled = task;
  int step_factor = 1;
  int width_factor = 1;
  switch (level) {
    case 'A':
      break;
    case 'B':
      step_factor = 10;
      width_factor = 2;
      break;
    case 'C':
      step_factor = 100;
      width_factor = 4;
      break;
    default:
      throw ValueError(std::string("unknown ladder level '") + level + "'");
  }
  scaled.task_id = task.task_id + "-" + level;
  scaled.steps *= step_factor;
  for (std::size_t i = 1; i + 1 < scaled.widths.size(); ++i)
    scaled.widths[i] *= width_factor;
  return scaled;
}

Dataset MakeDataset(const ProxyTask& task) {
  Dataset data;
  data.input_dim = task.widths.front();
  Rng rng(task.data_seed);
  if (task.dataset == "linreg") {
    const int d = data.input_dim;
    std::vector<double> wstar(d);
    for (double& x : wstar) x = rng.Normal();
    auto fill = [&](std::vector<double>& xs, std::vector<double>& ys, int n) {
      xs.resize(static_cast<std::size_t>(n) * d);
      ys.resize(n);
      for (int i = 0; i < n; ++i) {
        double dot = 0.0;
        for (int j = 0; j < d; ++j) {
          const double x = rng.Normal();
          xs[static_cast<std::size_t>(i) * d + j] = x;
          dot += x * wstar[j];
        }
        ys[i] = dot + 0.1 * rng.Normal();
      }
    };
    fill(data.train_x, data.train_y, task.train_size);
    fill(data.val_x, data.val_y, task.val_size);
    return data;
  }
  if (task.dataset == "blobs") {
    const int d = data.input_dim;
    const int k = task.widths.back();
    data.num_classes = k;
    // Class centers on a circle of radius 3 in the first two coordinates.
    std::vector<double> centers(static_cast<std::size_t>(k) * d, 0.0);
    for (int c = 0; c < k; ++c) {
      const double angle = 2.0 * std::numbers::pi * c / k;
      centers[static_cast<std::size_t>(c) * d] = 3.0 * std::cos(angle);
      if (d > 1) centers[static_cast<std::size_t>(c) * d + 1] = 3.0 * std::sin(angle);
    }
    auto fill = [&](std::vector<double>& xs, std::vector<int>& ls, int n) {
      xs.resize(static_cast<std::size_t>(n) * d);
      ls.resize(n);
      for (int i = 0; i < n; ++i) {
        const int c = i % k;
        ls[i] = c;
        for (int j = 0; j < d; ++j)
          xs[static_cast<std::size_t>(i) * d + j] =
              centers[static_cast<std::size_t>(c) * d + j] + rng.Normal();
      }
    };
    fill(data.train_x, data.train_label, task.train_size);
    fill(data.val_x, data.val_label, task.val_size);
    return data;
  }
  if (task.dataset == "quadratic") return data;
  throw ValueError("unknown dataset '" + task.dataset + "'");
}

TensorValue InitWeights(const ProxyTask& task, std::uint64_t seed) {
  Rng rng(MixSeeds(task.data_seed, seed));
  std::vector<std::pair<std::string, TensorValue>> leaves;
  if (IsQuadratic(task) || !IsClassification(task)) {
    const int d = task.widths.front();
    std::vector<double> w(d);
    const double scale = IsQuadratic(task) ? 1.0 : 1.0 / std::sqrt(d);
    for (double& x : w) x = scale * rng.Normal();
    leaves.emplace_back("w1", TensorValue::Vector(std::move(w)));
    return TensorValue::Tree(std::move(leaves));
  }
  for (std::size_t l = 1; l < task.widths.size(); ++l) {
    const int in = task.widths[l - 1];
    const int out = task.widths[l];
    std::vector<double> w(static_cast<std::size_t>(in) * out);
    const double scale = 1.0 / std::sqrt(in);
    for (double& x : w) x = scale * rng.Normal();
    leaves.emplace_back("w" + std::to_string(l),
                        TensorValue::Array({static_cast<std::size_t>(in),
                                            static_cast<std::size_t>(out)},
                                           std::move(w)));
    leaves.emplace_back("b" + std::to_string(l),
                        TensorValue::Vector(std::vector<double>(out, 0.0)));
  }
  return TensorValue::Tree(std::move(leaves));
}

InputSignature TaskSignature(const ProxyTask& task) {
  return InputSignature::FromWeights(InitWeights(task, 0));
}

ForwardBackwardResult ForwardBackward(const ProxyTask& task, const Dataset& data,
                                      const TensorValue& weights, bool validation,
                                      int begin, int count) {
  ForwardBackwardResult result;
  if (IsQuadratic(task)) {
    const TensorValue* w = weights.Find("w1");
    double sq = 0.0;
    for (double x : w->data()) sq += x * x;
    result.loss = 0.5 * task.quadratic_lambda * sq;
    std::vector<double> grad(w->data());
    for (double& x : grad) x *= task.quadratic_lambda;
    result.grads = TensorValue::Tree(
        {{"w1", TensorValue::Vector(std::move(grad))}});
    return result;
  }

  const std::vector<double>& split_x = validation ? data.val_x : data.train_x;
  const int n = validation ? task.val_size : task.train_size;
  const int d = data.input_dim;

  if (!IsClassification(task)) {
    const std::vector<double>& split_y = validation ? data.val_y : data.train_y;
    std::vector<double> xs, ys;
    GatherRows(split_x, d, n, begin, count, xs, nullptr, nullptr, &split_y, &ys);
    const TensorValue* w = weights.Find("w1");
    std::vector<double> grad(d, 0.0);
    double loss = 0.0;
    for (int i = 0; i < count; ++i) {
      const double* row = xs.data() + static_cast<std::size_t>(i) * d;
      double pred = 0.0;
      for (int j = 0; j < d; ++j) pred += row[j] * w->data()[j];
      const double err = pred - ys[i];
      loss += 0.5 * err * err;
      for (int j = 0; j < d; ++j) grad[j] += row[j] * err;
    }
    result.loss = loss / count;
    for (double& x : grad) x /= count;
    result.grads = TensorValue::Tree(
        {{"w1", TensorValue::Vector(std::move(grad))}});
    return result;
  }

  const std::vector<int>& split_label =
      validation ? data.val_label : data.train_label;
  std::vector<double> xs;
  std::vector<int> labels;
  GatherRows(split_x, d, n, begin, count, xs, &split_label, &labels, nullptr,
             nullptr);

  MlpPass pass;
  MlpForward(task, weights, xs, count, pass);
  const std::size_t layers = task.widths.size() - 1;
  const int classes = task.widths.back();
  std::vector<double> dz;
  result.loss = SoftmaxLoss(pass.acts[layers], labels.data(), count, classes, &dz);

  // Backprop; gradient leaves mirror the weight tree's key order.
  std::vector<std::pair<std::string, TensorValue>> leaves(2 * layers);
  for (std::size_t l = layers; l >= 1; --l) {
    const int in = task.widths[l - 1];
    const int out = task.widths[l];
    const std::vector<double>& a = pass.acts[l - 1];
    std::vector<double> dW(static_cast<std::size_t>(in) * out, 0.0);
    std::vector<double> db(out, 0.0);
    for (int r = 0; r < count; ++r) {
      const double* arow = a.data() + static_cast<std::size_t>(r) * in;
      const double* dzrow = dz.data() + static_cast<std::size_t>(r) * out;
      for (int j = 0; j < out; ++j) db[j] += dzrow[j];
      for (int i = 0; i < in; ++i) {
        const double ai = arow[i];
        double* dwrow = dW.data() + static_cast<std::size_t>(i) * out;
        for (int j = 0; j < out; ++j) dwrow[j] += ai * dzrow[j];
      }
    }
    if (l > 1) {
      const TensorValue* W = weights.Find("w" + std::to_string(l));
      std::vector<double> da(static_cast<std::size_t>(count) * in, 0.0);
      for (int r = 0; r < count; ++r) {
        const double* dzrow = dz.data() + static_cast<std::size_t>(r) * out;
        double* darow = da.data() + static_cast<std::size_t>(r) * in;
        for (int i = 0; i < in; ++i) {
          const double* wrow = W->data().data() + static_cast<std::size_t>(i) * out;
          double acc = 0.0;
          for (int j = 0; j < out; ++j) acc += wrow[j] * dzrow[j];
          darow[i] = acc;
        }
      }
      // tanh' = 1 - a^2 on the stored activation.
      for (std::size_t i = 0; i < da.size(); ++i) da[i] *= 1.0 - a[i] * a[i];
      dz = std::move(da);
    }
    leaves[2 * (l - 1)] = {"w" + std::to_string(l),
                           TensorValue::Array({static_cast<std::size_t>(in),
                                               static_cast<std::size_t>(out)},
                                              std::move(dW))};
    leaves[2 * (l - 1) + 1] = {"b" + std::to_string(l),
                               TensorValue::Vector(std::move(db))};
  }
  result.grads = TensorValue::Tree(std::move(leaves));
  return result;
}

const char* StatusName(Fitness::Status s) {
  switch (s) {
    case Fitness::Status::kOk:
      return "ok";
    case Fitness::Status::kNonfinite:
      return "nonfinite";
    case Fitness::Status::kTimeout:
      return "timeout";
  }
  return "unknown";
}

bool FitnessLess(const Fitness& a, const Fitness& b) {
  const bool a_ok = a.status == Fitness::Status::kOk;
  const bool b_ok = b.status == Fitness::Status::kOk;
  if (a_ok != b_ok) return !a_ok;
  if (!a_ok) return false;  // all failures rank equal
  return a.value < b.value;
}

namespace {

double ValidationMetric(const ProxyTask& task, const Dataset& data,
                        const TensorValue& weights) {
  if (IsQuadratic(task)) {
    const TensorValue* w = weights.Find("w1");
    double sq = 0.0;
    for (double x : w->data()) sq += x * x;
    return -0.5 * task.quadratic_lambda * sq;
  }
  if (task.metric == ProxyTask::Metric::kNegValLoss)
    return -ForwardBackward(task, data, weights, true, 0, task.val_size).loss;

  // Validation accuracy of the classifier.
  std::vector<double> xs;
  std::vector<int> labels;
  GatherRows(data.val_x, data.input_dim, task.val_size, 0, task.val_size, xs,
             &data.val_label, &labels, nullptr, nullptr);
  MlpPass pass;
  MlpForward(task, weights, xs, task.val_size, pass);
  const int classes = task.widths.back();
  const std::vector<double>& logits = pass.acts[task.widths.size() - 1];
  int correct = 0;
  for (int r = 0; r < task.val_size; ++r) {
    const double* row = logits.data() + static_cast<std::size_t>(r) * classes;
    int arg = 0;
    for (int j = 1; j < classes; ++j)
      if (row[j] > row[arg]) arg = j;
    if (arg == labels[r]) ++correct;
  }
  return static_cast<double>(correct) / task.val_size;
}

}  // namespace

Fitness EvaluateFitness(const Program& p, const ProxyTask& task,
                        std::uint64_t seed) {
  const Dataset data = MakeDataset(task);
  TensorValue w = InitWeights(task, seed);
  TensorValue m = TensorValue::ZerosLike(w);
  TensorValue v = TensorValue::ZerosLike(w);

  const auto start = std::chrono::steady_clock::now();
  Fitness fitness;
  for (int step = 0; step < task.steps; ++step) {
    if ((step & 31) == 0) {
      const std::chrono::duration<double> elapsed =
          std::chrono::steady_clock::now() - start;
      if (elapsed.count() > task.timeout_seconds) {
        fitness.status = Fitness::Status::kTimeout;
        fitness.value = -std::numeric_limits<double>::infinity();
        return fitness;
      }
    }
    const double lr = Schedule(step, task.steps, task.schedule);
    const int begin = (step * task.batch_size) % task.train_size;
    const ForwardBackwardResult fb =
        ForwardBackward(task, data, w, false, begin, task.batch_size);
    if (!std::isfinite(fb.loss)) {
      fitness.status = Fitness::Status::kNonfinite;
      fitness.value = -std::numeric_limits<double>::infinity();
      return fitness;
    }
    try {
      ExecutionResult result =
          Execute(p, w, fb.grads, m, v, TensorValue::Scalar(lr));
      w = BinaryMap(w, result.update, [](double wi, double ui) { return wi - ui; });
      m = std::move(result.m);
      v = std::move(result.v);
    } catch (const ValueError&) {
      // Flow-divergent m/v kinds can break shape checks at run time; treated
      // as a failed candidate, not an engine error.
      fitness.status = Fitness::Status::kNonfinite;
      fitness.value = -std::numeric_limits<double>::infinity();
      return fitness;
    }
    if (!w.AllFinite()) {
      fitness.status = Fitness::Status::kNonfinite;
      fitness.value = -std::numeric_limits<double>::infinity();
      return fitness;
    }
  }

  fitness.value = ValidationMetric(task, data, w);
  if (!std::isfinite(fitness.value)) {
    fitness.status = Fitness::Status::kNonfinite;
    fitness.value = -std::numeric_limits<double>::infinity();
  }
  return fitness;
}

Fitness MetaValidate(const Program& p, const ProxyTask& task, char level,
                     std::uint64_t seed) {
  return EvaluateFitness(p, ScaleTask(task, level), seed);
}

FunnelResult FunnelSelect(const std::vector<Program>& candidates,
                          const Program& baseline, const ProxyTask& task,
                          const std::vector<char>& levels, std::uint64_t seed,
                          int threads) {
  FunnelResult result;
  result.levels = levels;
  std::vector<std::size_t> alive(candidates.size());
  for (std::size_t i = 0; i < candidates.size(); ++i) alive[i] = i;

  for (char level : levels) {
    const std::uint64_t level_seed =
        MixSeeds(seed, static_cast<std::uint64_t>(level));
    const Fitness base = MetaValidate(baseline, task, level, level_seed);
    result.baseline.push_back(base);

    std::vector<Fitness> scores(alive.size());
    const int workers =
        std::max(1, std::min<int>(threads, static_cast<int>(alive.size())));
    if (workers <= 1) {
      for (std::size_t i = 0; i < alive.size(); ++i)
        scores[i] = MetaValidate(candidates[alive[i]], task, level, level_seed);
    } else {
      std::vector<std::thread> pool;
      std::atomic<std::size_t> next{0};
      for (int t = 0; t < workers; ++t)
        pool.emplace_back([&]() {
          for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= alive.size()) return;
            scores[i] = MetaValidate(candidates[alive[i]], task, level, level_seed);
          }
        });
      for (std::thread& t : pool) t.join();
    }

    std::vector<std::size_t> survivors;
    std::vector<Fitness> survivor_scores;
    for (std::size_t i = 0; i < alive.size(); ++i) {
      if (FitnessLess(base, scores[i])) {
        survivors.push_back(alive[i]);
        survivor_scores.push_back(scores[i]);
      }
    }
    result.survivors.push_back(survivors);
    result.fitness.push_back(std::move(survivor_scores));
    alive = std::move(survivors);
  }
  return result;
}

double TrainLoss(const ProxyTask& task, const Dataset& data,
                 const TensorValue& weights) {
  if (IsQuadratic(task)) {
    const TensorValue* w = weights.Find("w1");
    double sq = 0.0;
    for (double x : w->data()) sq += x * x;
    return 0.5 * task.quadratic_lambda * sq;
  }
  return ForwardBackward(task, data, weights, false, 0, task.train_size).loss;
}

double Flatness(const TensorValue& weights, const ProxyTask& task,
                double sigma, int draws, std::uint64_t seed) {
  const Dataset data = MakeDataset(task);
  Rng rng(seed);
  double acc = 0.0;
  for (int i = 0; i < draws; ++i) {
    TensorValue noisy = weights;
    AddNoise(noisy, sigma, rng);
    acc += TrainLoss(task, data, noisy);
  }
  return acc / draws;
}

}  // namespace optimforge
