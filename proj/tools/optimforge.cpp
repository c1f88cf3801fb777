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

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"

#include "optimforge/abstract.hpp"
#include "optimforge/assets.hpp"
#include "optimforge/evolution.hpp"
#include "optimforge/functions.hpp"
#include "optimforge/optimizers.hpp"
#include "optimforge/program.hpp"
#include "optimforge/simplify.hpp"
#include "optimforge/task.hpp"

namespace {

using namespace optimforge;

// User mistakes (bad files, bad programs) exit 1; engine bugs exit 2.
class UserError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UserError("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// A program reference is an embedded asset name or a file path (text grammar,
// or JSON when the file ends in .json).
Program LoadProgram(const std::string& ref) {
  const std::string_view asset = assets::Find(ref);
  try {
    if (!asset.empty()) return ParseProgram(asset);
    const std::string text = ReadFile(ref);
    if (ref.size() > 5 && ref.substr(ref.size() - 5) == ".json")
      return ProgramFromJson(text);
    return ParseProgram(text);
  } catch (const ParseError& e) {
    throw UserError(ref + ":" + std::to_string(e.line) + ":" +
                    std::to_string(e.column) + ": " + e.what());
  }
}

ProxyTask LoadTask(const std::string& ref) {
  if (ref.size() > 5 && ref.substr(ref.size() - 5) == ".json")
    return TaskFromJson(ReadFile(ref));
  try {
    return BuiltinTask(ref);
  } catch (const ValueError& e) {
    throw UserError(e.what());
  }
}

int EnvThreads() {
  const char* env = std::getenv("OPTIMFORGE_THREADS");
  if (env == nullptr) return 1;
  const int n = std::atoi(env);
  return n > 0 ? n : 1;
}

RestartPolicy ParseRestart(const std::string& text) {
  RestartPolicy policy;
  if (text.empty() || text == "none") return policy;
  const auto colon = text.find(':');
  const std::string kind = text.substr(0, colon);
  const int param =
      colon == std::string::npos ? 0 : std::atoi(text.c_str() + colon + 1);
  if (kind == "from_initial") {
    policy.kind = RestartPolicy::Kind::kFromInitial;
    policy.param = param > 0 ? param : 2;
    return policy;
  }
  if (kind == "from_best_after") {
    policy.kind = RestartPolicy::Kind::kFromBestAfter;
    policy.param = param;
    return policy;
  }
  throw UserError("unknown restart policy '" + text + "'");
}

std::string FitnessJson(const Fitness& f) {
  std::string out = "{\"fitness\":";
  out += f.status == Fitness::Status::kOk ? FormatConstant(f.value) : "null";
  out += std::string(",\"status\":\"") + StatusName(f.status) + "\"}";
  return out;
}

int RunTrain(const std::string& optimizer, const std::string& task_ref,
             const OptimizerHyperparams& hp, double beta, int steps_override,
             const std::string& out_path) {
  const ProxyTask base = LoadTask(task_ref);
  ProxyTask task = base;
  if (steps_override > 0) task.steps = steps_override;
  const Dataset data = MakeDataset(task);
  TensorValue w = InitWeights(task, 0);

  const bool is_adamw = optimizer == "adamw";
  const bool is_lion = optimizer == "lion";
  const bool is_ablation = optimizer == "ablation";
  Program prog;
  TensorValue m = TensorValue::ZerosLike(w);
  TensorValue v = TensorValue::ZerosLike(w);
  OptimizerState state = is_adamw ? OptimizerState::AdamW(w)
                                  : OptimizerState::Lion(w);
  if (!is_adamw && !is_lion && !is_ablation) {
    prog = LoadProgram(optimizer);
    Infer(prog, TaskSignature(task));
  }

  std::ofstream file;
  std::ostream* out = &std::cout;
  if (!out_path.empty()) {
    file.open(out_path, std::ios::trunc);
    out = &file;
  }

  for (int step = 0; step < task.steps; ++step) {
    const double sched = Schedule(step, task.steps, task.schedule);
    const ForwardBackwardResult fb = ForwardBackward(
        task, data, w, false, (step * task.batch_size) % task.train_size,
        task.batch_size);
    const TensorValue before = w;
    if (is_adamw) {
      AdamWStep(w, fb.grads, state, hp, sched * hp.lr);
    } else if (is_lion) {
      LionStep(w, fb.grads, state, hp, sched * hp.lr);
    } else if (is_ablation) {
      AblationStep(w, fb.grads, state, beta, sched * hp.lr, hp.lambda);
    } else {
      ExecutionResult r =
          Execute(prog, w, fb.grads, m, v, TensorValue::Scalar(sched));
      w = BinaryMap(w, r.update, [](double a, double b) { return a - b; });
      m = std::move(r.m);
      v = std::move(r.v);
    }
    const double update_norm =
        GlobalNorm(BinaryMap(before, w, [](double a, double b) { return a - b; }));
    (*out) << "{\"step\":" << step << ",\"loss\":" << FormatConstant(fb.loss)
           << ",\"lr\":" << FormatConstant(sched)
           << ",\"update_norm\":" << FormatConstant(update_norm)
           << ",\"weight_norm\":" << FormatConstant(GlobalNorm(w)) << "}\n";
    if (!w.AllFinite()) break;
  }
  return 0;
}

int Dispatch(int argc, char** argv) {
  CLI::App app{"optimforge: symbolic search for gradient-based optimizers"};
  app.require_subcommand(1);
  int threads = EnvThreads();

  // search
  auto* search = app.add_subcommand("search", "run regularized evolution");
  std::string s_task = "linreg", s_out, s_restart = "none",
              s_seed_prog = "adamw", s_config;
  int s_pop = 1000, s_tour = 2, s_budget = 1000, s_repeats = 1, s_maxlen = 64,
      s_randlen = 12;
  std::uint64_t s_seed = 0;
  bool s_random = false, s_constants = false;
  search->add_option("--task", s_task, "task id or spec file");
  search->add_option("--population", s_pop);
  search->add_option("--tournament", s_tour);
  search->add_option("--budget", s_budget, "children to generate");
  search->add_option("--seed", s_seed);
  search->add_option("--out", s_out, "run directory");
  search->add_option("--restart", s_restart,
                     "none | from_initial:k | from_best_after:n");
  search->add_option("--seed-program", s_seed_prog);
  search->add_option("--repeats", s_repeats);
  search->add_option("--max-statements", s_maxlen);
  search->add_option("--random-program-length", s_randlen);
  search->add_option("--threads", threads);
  search->add_flag("--random-search", s_random, "random-program baseline arm");
  search->add_flag("--constants-only", s_constants,
                   "mutate constants only (tuning baseline arm)");
  search->add_option("--config", s_config, "rerun from a frozen config.json");

  // eval
  auto* eval = app.add_subcommand("eval", "fitness of one program");
  std::string e_prog, e_task = "linreg";
  std::uint64_t e_seed = 0;
  eval->add_option("program", e_prog)->required();
  eval->add_option("--task", e_task);
  eval->add_option("--seed", e_seed);

  // train
  auto* train = app.add_subcommand("train", "training run with metrics JSONL");
  std::string t_opt = "adamw", t_task = "linreg", t_out, t_preset;
  OptimizerHyperparams t_hp;
  double t_beta = 0.9;
  int t_steps = 0;
  train->add_option("--optimizer", t_opt,
                    "adamw | lion | ablation | program file/asset");
  train->add_option("--task", t_task);
  train->add_option("--preset", t_preset, "tuning-table preset key");
  train->add_option("--lr", t_hp.lr);
  train->add_option("--weight-decay", t_hp.lambda);
  train->add_option("--beta1", t_hp.beta1);
  train->add_option("--beta2", t_hp.beta2);
  train->add_option("--beta", t_beta, "ablation momentum factor");
  train->add_option("--steps", t_steps);
  train->add_option("--out", t_out);

  // simplify
  auto* simplify = app.add_subcommand("simplify", "prune + canonicalize");
  std::string y_prog, y_task = "linreg";
  double y_eps = kDefaultPruneEpsilon;
  std::uint64_t y_seed = 0;
  simplify->add_option("program", y_prog)->required();
  simplify->add_option("--task", y_task);
  simplify->add_option("--eps", y_eps);
  simplify->add_option("--seed", y_seed);

  // strip
  auto* strip = app.add_subcommand("strip", "remove redundant statements");
  std::string r_prog;
  strip->add_option("program", r_prog)->required();

  // hash
  auto* hash = app.add_subcommand("hash", "functional hash of a program");
  std::string h_prog;
  bool h_raw = false;
  hash->add_option("program", h_prog)->required();
  hash->add_flag("--raw", h_raw, "skip commutative canonicalization");

  // funnel
  auto* funnel = app.add_subcommand("funnel", "meta-validation ladder filter");
  std::vector<std::string> f_progs;
  std::string f_base = "adamw", f_task = "linreg", f_levels = "ABC";
  std::uint64_t f_seed = 0;
  funnel->add_option("programs", f_progs)->required();
  funnel->add_option("--baseline", f_base);
  funnel->add_option("--task", f_task);
  funnel->add_option("--levels", f_levels);
  funnel->add_option("--seed", f_seed);
  funnel->add_option("--threads", threads);

  // estimate-space
  auto* space = app.add_subcommand("estimate-space", "program-count estimate");
  std::uint64_t n_f = 0, n_v = 0, n_a = 0, n_l = 0;
  space->add_option("--functions", n_f)->required();
  space->add_option("--variables", n_v)->required();
  space->add_option("--arity", n_a)->required();
  space->add_option("--length", n_l)->required();

  CLI11_PARSE(app, argc, argv);

  if (search->parsed()) {
    SearchConfig cfg;
    if (!s_config.empty()) {
      cfg = SearchConfigFromJson(ReadFile(s_config));
    } else {
      cfg.population = s_pop;
      cfg.tournament = s_tour;
      cfg.budget = s_budget;
      cfg.seed = s_seed;
      cfg.restart = ParseRestart(s_restart);
      cfg.task = LoadTask(s_task);
      cfg.seed_program = LoadProgram(s_seed_prog);
      cfg.repeats = s_repeats;
      cfg.random_search = s_random;
      cfg.random_program_length = s_randlen;
      cfg.mutation.max_statements = s_maxlen;
      cfg.mutation.constants_only = s_constants;
    }
    cfg.out_dir = s_out;
    cfg.threads = threads;
    const SearchResult result = RunSearch(cfg);
    std::cout << "best_hash " << result.best.hash.Hex() << "\n"
              << "best_fitness " << FitnessJson(result.best.fitness) << "\n";
    std::cout << PrintProgram(result.best.program);
    return 0;
  }

  if (eval->parsed()) {
    const Program p = LoadProgram(e_prog);
    const ProxyTask task = LoadTask(e_task);
    try {
      Infer(p, TaskSignature(task));
    } catch (const TypeError& e) {
      throw UserError(std::string("invalid program: ") + e.what());
    }
    std::cout << FitnessJson(EvaluateFitness(p, task, e_seed)) << "\n";
    return 0;
  }

  if (train->parsed()) {
    if (!t_preset.empty()) {
      const OptimizerPreset* preset = FindPreset(t_preset);
      if (preset == nullptr) throw UserError("unknown preset '" + t_preset + "'");
      t_hp = t_opt == "lion" ? preset->lion : preset->baseline;
    }
    return RunTrain(t_opt, t_task, t_hp, t_beta, t_steps, t_out);
  }

  if (simplify->parsed()) {
    const Program p = LoadProgram(y_prog);
    const SimplifyReport report = Simplify(p, LoadTask(y_task), y_eps, y_seed);
    std::cout << SimplifyReportToJson(report) << "\n";
    return 0;
  }

  if (strip->parsed()) {
    std::cout << PrintProgram(StripRedundant(LoadProgram(r_prog)));
    return 0;
  }

  if (hash->parsed()) {
    const Program p = LoadProgram(h_prog);
    try {
      Infer(p, InputSignature::ScalarSig());
    } catch (const TypeError& e) {
      throw UserError(std::string("invalid program: ") + e.what());
    }
    std::cout << FunctionalHash(p, InputSignature::ScalarSig(), !h_raw).Hex()
              << "\n";
    return 0;
  }

  if (funnel->parsed()) {
    std::vector<Program> candidates;
    for (const std::string& ref : f_progs) candidates.push_back(LoadProgram(ref));
    const FunnelResult result =
        FunnelSelect(candidates, LoadProgram(f_base), LoadTask(f_task),
                     std::vector<char>(f_levels.begin(), f_levels.end()),
                     f_seed, threads);
    for (std::size_t l = 0; l < result.levels.size(); ++l) {
      std::cout << "{\"level\":\"" << result.levels[l] << "\",\"baseline\":"
                << FitnessJson(result.baseline[l]) << ",\"survivors\":[";
      for (std::size_t i = 0; i < result.survivors[l].size(); ++i) {
        if (i > 0) std::cout << ",";
        std::cout << result.survivors[l][i];
      }
      std::cout << "]}\n";
    }
    return 0;
  }

  if (space->parsed()) {
    std::cout << EstimateSpace(n_f, n_v, n_a, n_l) << "\n";
    return 0;
  }

  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return Dispatch(argc, argv);
  } catch (const UserError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 2;
  }
}
