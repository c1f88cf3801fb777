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

#include <benchmark/benchmark.h>

#include "optimforge/abstract.hpp"
#include "optimforge/assets.hpp"
#include "optimforge/evolution.hpp"
#include "optimforge/mutation.hpp"
#include "optimforge/program.hpp"
#include "optimforge/task.hpp"

namespace optimforge {
namespace {

TensorValue BenchTree(int n) {
  std::vector<double> a(static_cast<std::size_t>(n), 0.5);
  std::vector<double> b(static_cast<std::size_t>(n), -0.25);
  return TensorValue::Tree({
      {"w1", TensorValue::Vector(a)},
      {"b1", TensorValue::Vector(b)},
  });
}

void BM_ExecuteAdamW(benchmark::State& state) {
  const Program p = ParseProgram(assets::AdamW());
  const int n = static_cast<int>(state.range(0));
  const TensorValue w = BenchTree(n), g = BenchTree(n);
  const TensorValue m = TensorValue::ZerosLike(w);
  const TensorValue v = TensorValue::ZerosLike(w);
  const TensorValue lr = TensorValue::Scalar(1.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(Execute(p, w, g, m, v, lr));
  }
  state.SetItemsProcessed(state.iterations() * 2 * n);
}
BENCHMARK(BM_ExecuteAdamW)->Arg(64)->Arg(1024)->Arg(16384);

void BM_FunctionalHash(benchmark::State& state) {
  const Program p = ParseProgram(assets::RawLion());
  const InputSignature sig = InputSignature::ScalarSig();
  for (auto _ : state) {
    benchmark::DoNotOptimize(FunctionalHash(p, sig));
  }
}
BENCHMARK(BM_FunctionalHash);

void BM_MutateUntilValid(benchmark::State& state) {
  const MutationConfig cfg;
  const InputSignature sig = InputSignature::ScalarSig();
  Rng rng(1);
  Program p = ParseProgram(assets::AdamW());
  for (auto _ : state) {
    auto child = MutateUntilValid(p, cfg, sig, rng);
    if (child.has_value()) p = std::move(*child);
    benchmark::DoNotOptimize(p);
  }
}
BENCHMARK(BM_MutateUntilValid);

void BM_FitnessQuadratic(benchmark::State& state) {
  const ProxyTask task = BuiltinTask("quadratic");
  const Program p = ParseProgram(assets::AdamW());
  std::uint64_t seed = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(EvaluateFitness(p, task, seed++));
  }
}
BENCHMARK(BM_FitnessQuadratic);

void BM_EvolutionCycle(benchmark::State& state) {
  SearchConfig cfg;
  cfg.population = 100;
  cfg.budget = 1;
  cfg.seed = 1;
  cfg.task = BuiltinTask("quadratic");
  cfg.seed_program = ParseProgram(assets::AdamW());
  SearchState st = InitPopulation(cfg.seed_program, cfg);
  for (auto _ : state) {
    benchmark::DoNotOptimize(Cycle(st, cfg));
  }
}
BENCHMARK(BM_EvolutionCycle);

}  // namespace
}  // namespace optimforge

BENCHMARK_MAIN();
