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

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "doctest.h"
#include "optimforge/assets.hpp"
#include "optimforge/rng.hpp"
#include "optimforge/task.hpp"

namespace optimforge {
namespace {

TEST_SUITE_BEGIN("task");

TEST_CASE("schedule warms up linearly then decays by cosine") {
  ScheduleSpec spec;
  spec.peak_lr = 1.0;
  spec.warmup_fraction = 0.1;
  const int total = 1000;
  // Warmup is linear in (step+1) so the first update is never exactly zero.
  CHECK(Schedule(0, total, spec) == doctest::Approx(0.01));
  CHECK(Schedule(49, total, spec) == doctest::Approx(0.5));
  CHECK(Schedule(99, total, spec) == doctest::Approx(1.0));
  CHECK(Schedule(100, total, spec) == doctest::Approx(1.0));
  // Monotone decay after warmup, ending near zero.
  double prev = Schedule(100, total, spec);
  for (int s = 101; s < total; s += 13) {
    const double cur = Schedule(s, total, spec);
    CHECK(cur <= prev);
    prev = cur;
  }
  CHECK(Schedule(total - 1, total, spec) < 0.01);

  spec.shape = ScheduleSpec::Shape::kConstant;
  CHECK(Schedule(500, total, spec) == 1.0);
}

TEST_CASE("builtin tasks are frozen and json round-trips") {
  const ProxyTask linreg = BuiltinTask("linreg");
  CHECK(linreg.steps == 2000);
  CHECK(linreg.batch_size == 32);
  CHECK(linreg.widths == std::vector<int>{100, 1});

  const ProxyTask blobs = BuiltinTask("mlp-blobs");
  CHECK(blobs.widths == std::vector<int>{2, 32, 32, 4});
  CHECK(blobs.metric == ProxyTask::Metric::kValAccuracy);
  CHECK(blobs.steps == 500);

  const ProxyTask quad = BuiltinTask("quadratic");
  CHECK(quad.steps == 200);
  CHECK_THROWS_AS(BuiltinTask("nope"), ValueError);

  for (const char* id : {"linreg", "mlp-blobs", "quadratic"}) {
    const ProxyTask t = BuiltinTask(id);
    CHECK(TaskFromJson(TaskToJson(t)) == t);
  }
}

TEST_CASE("ladder scaling multiplies steps and hidden widths") {
  const ProxyTask base = BuiltinTask("mlp-blobs");
  const ProxyTask b = ScaleTask(base, 'B');
  CHECK(b.steps == base.steps * 10);
  CHECK(b.widths == std::vector<int>{2, 64, 64, 4});
  CHECK(b.task_id == base.task_id + "-B");
  const ProxyTask c = ScaleTask(base, 'C');
  CHECK(c.steps == base.steps * 100);
  CHECK(c.widths == std::vector<int>{2, 128, 128, 4});
  const ProxyTask a = ScaleTask(base, 'A');
  CHECK(a.steps == base.steps);
  CHECK(a.widths == base.widths);
}

TEST_CASE("datasets are deterministic in the data seed") {
  const ProxyTask task = BuiltinTask("mlp-blobs");
  const Dataset d1 = MakeDataset(task);
  const Dataset d2 = MakeDataset(task);
  CHECK(d1.train_x == d2.train_x);
  CHECK(d1.train_label == d2.train_label);
  ProxyTask other = task;
  other.data_seed += 1;
  CHECK(MakeDataset(other).train_x != d1.train_x);
}

TEST_CASE("zero-weight classification loss is ln(num_classes)") {
  const ProxyTask task = BuiltinTask("mlp-blobs");
  const Dataset data = MakeDataset(task);
  const TensorValue w = TensorValue::ZerosLike(InitWeights(task, 0));
  const ForwardBackwardResult fb = ForwardBackward(task, data, w, false, 0, 64);
  CHECK(fb.loss == doctest::Approx(std::log(4.0)).epsilon(1e-12));
}

TEST_CASE("softmax loss resists absorption at huge logit magnitudes") {
  // With zero hidden weights and an output bias of -3e302 on every class,
  // all logits tie at a huge negative value: the prediction is uniform and
  // the true loss is ln(4). A log-sum-exp that adds the max back before
  // subtracting the label logit absorbs ln(4) and reports exactly 0.
  const ProxyTask task = BuiltinTask("mlp-blobs");
  const Dataset data = MakeDataset(task);
  TensorValue w = TensorValue::ZerosLike(InitWeights(task, 0));
  for (auto& [key, child] : w.mutable_children())
    if (key == "b3")
      for (double& x : child.mutable_data()) x = -3e302;
  const ForwardBackwardResult fb = ForwardBackward(task, data, w, false, 0, 64);
  CHECK(fb.loss == doctest::Approx(std::log(4.0)).epsilon(1e-12));
  // The softmax itself is uniform, so each bias gradient stays bounded.
  const TensorValue* gb3 = fb.grads.Find("b3");
  REQUIRE(gb3 != nullptr);
  for (double g : gb3->data()) CHECK(std::fabs(g) <= 1.0);
}

TEST_CASE("quadratic loss and gradient are analytic") {
  const ProxyTask task = BuiltinTask("quadratic");
  const Dataset data = MakeDataset(task);
  const TensorValue w = InitWeights(task, 3);
  const ForwardBackwardResult fb = ForwardBackward(task, data, w, false, 0, 1);
  // loss = 0.5 * lambda * |w|^2, grad = lambda * w
  double sq = 0;
  ForEachLeafValue(w, [&](double x) { sq += x * x; });
  CHECK(fb.loss == doctest::Approx(0.5 * task.quadratic_lambda * sq));
  const TensorValue* gw = fb.grads.Find("w1");
  const TensorValue* ww = w.Find("w1");
  REQUIRE(gw != nullptr);
  for (std::size_t i = 0; i < gw->data().size(); ++i)
    CHECK(gw->data()[i] ==
          doctest::Approx(task.quadratic_lambda * ww->data()[i]));
}

TEST_CASE("gradients match central finite differences") {
  Rng pick(2718);
  for (const char* id : {"linreg", "mlp-blobs"}) {
    CAPTURE(id);
    const ProxyTask task = BuiltinTask(id);
    const Dataset data = MakeDataset(task);
    TensorValue w = InitWeights(task, 1);
    const int batch = 16;
    const ForwardBackwardResult fb =
        ForwardBackward(task, data, w, false, 0, batch);

    // Flatten leaf pointers for random coordinate probing.
    std::vector<std::pair<TensorValue*, std::size_t>> coords;
    const std::function<void(TensorValue&)> collect = [&](TensorValue& t) {
      if (t.is_tree()) {
        for (auto& [k, c] : t.mutable_children()) collect(c);
      } else if (t.is_array()) {
        for (std::size_t i = 0; i < t.data().size(); ++i)
          coords.emplace_back(&t, i);
      }
    };
    collect(w);
    REQUIRE(!coords.empty());

    std::vector<double> flat_grads;
    ForEachLeafValue(fb.grads, [&](double x) { flat_grads.push_back(x); });

    const double h = 1e-5;
    for (int probe = 0; probe < 50; ++probe) {
      const std::size_t c = pick.Index(coords.size());
      auto [leaf, idx] = coords[c];
      const double orig = leaf->data()[idx];
      leaf->mutable_data()[idx] = orig + h;
      const double up = ForwardBackward(task, data, w, false, 0, batch).loss;
      leaf->mutable_data()[idx] = orig - h;
      const double down = ForwardBackward(task, data, w, false, 0, batch).loss;
      leaf->mutable_data()[idx] = orig;
      const double fd = (up - down) / (2 * h);
      const double an = flat_grads[c];
      const double scale = std::max({std::fabs(fd), std::fabs(an), 1e-6});
      CHECK(std::fabs(fd - an) / scale < 1e-4);
    }
  }
}

TEST_CASE("fitness is deterministic and orders correctly") {
  const ProxyTask task = BuiltinTask("quadratic");
  const Program good = ParseProgram(assets::AdamW());
  const Fitness f1 = EvaluateFitness(good, task, 7);
  const Fitness f2 = EvaluateFitness(good, task, 7);
  CHECK(f1.status == Fitness::Status::kOk);
  CHECK(BitsEqual(f1.value, f2.value));

  // A diverging program: w <- w - (-10 g) explodes on the quadratic.
  const Program bad = ParseProgram(
      "def train(w, g, m, v, lr):\n"
      "  update = g * -100.0\n"
      "  return update, m, v\n");
  const Fitness fbad = EvaluateFitness(bad, task, 7);
  CHECK(fbad.status == Fitness::Status::kNonfinite);
  CHECK(FitnessLess(fbad, f1));
  CHECK_FALSE(FitnessLess(f1, fbad));
  // Failures tie with each other.
  Fitness timeout;
  timeout.status = Fitness::Status::kTimeout;
  CHECK_FALSE(FitnessLess(fbad, timeout));
  CHECK_FALSE(FitnessLess(timeout, fbad));
}

TEST_CASE("adamw trains the linear regression better than no-op") {
  const ProxyTask task = BuiltinTask("linreg");
  const Fitness adamw =
      EvaluateFitness(ParseProgram(assets::AdamW()), task, 0);
  const Program noop = ParseProgram(
      "def train(w, g, m, v, lr):\n"
      "  update = g * 0.0\n"
      "  return update, m, v\n");
  const Fitness idle = EvaluateFitness(noop, task, 0);
  REQUIRE(adamw.status == Fitness::Status::kOk);
  REQUIRE(idle.status == Fitness::Status::kOk);
  CHECK(adamw.value > idle.value);
}

TEST_CASE("lion trains the mlp to useful accuracy") {
  const ProxyTask task = BuiltinTask("mlp-blobs");
  const Fitness lion = EvaluateFitness(ParseProgram(assets::Lion()), task, 0);
  REQUIRE(lion.status == Fitness::Status::kOk);
  CHECK(lion.value > 0.75);  // accuracy on 4 well-separated blobs
}

TEST_CASE("funnel keeps only strictly-better candidates") {
  const ProxyTask task = BuiltinTask("quadratic");
  const Program baseline = ParseProgram(assets::AdamW());
  const Program noop = ParseProgram(
      "def train(w, g, m, v, lr):\n"
      "  update = g * 0.0\n"
      "  return update, m, v\n");
  // Strong candidate: plain gradient descent with a healthy rate on the
  // quadratic converges much faster than the small-lr AdamW listing.
  const Program gd = ParseProgram(
      "def train(w, g, m, v, lr):\n"
      "  update = g * lr\n"
      "  return update, m, v\n");
  const FunnelResult r =
      FunnelSelect({noop, gd}, baseline, task, {'A', 'B'}, 0);
  REQUIRE(r.levels.size() == 2);
  REQUIRE(r.survivors.size() == 2);
  // The no-op never survives level A.
  for (const auto& level : r.survivors)
    for (std::size_t idx : level) CHECK(idx != 0);
}

TEST_CASE("flatness approaches the analytic quadratic expectation") {
  const ProxyTask task = BuiltinTask("quadratic");
  const TensorValue w0 =
      TensorValue::Tree({{"w1", TensorValue::Vector(std::vector<double>(100, 0.0))}});
  const double sigma = 0.2;
  const double mc = Flatness(w0, task, sigma, 4000, 13);
  const double expect = 0.5 * task.quadratic_lambda * sigma * sigma * 100;
  CHECK(mc == doctest::Approx(expect).epsilon(0.1));
}

TEST_SUITE_END();

}  // namespace
}  // namespace optimforge
