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

#include "optimforge/mutation.hpp"

#include <algorithm>
#include <cmath>

#include "optimforge/functions.hpp"

namespace optimforge {

namespace {

// Variables readable by a statement at position `pos`: the five inputs plus
// outputs of earlier statements.
std::vector<std::string> ScopeAt(const Program& p, std::size_t pos) {
  std::vector<std::string> scope;
  for (std::string_view input : Program::Inputs()) scope.emplace_back(input);
  for (std::size_t i = 0; i < pos && i < p.statements.size(); ++i) {
    const std::string& out = p.statements[i].out;
    if (std::find(scope.begin(), scope.end(), out) == scope.end())
      scope.push_back(out);
  }
  return scope;
}

// Names an inserted statement may overwrite: outputs of existing statements
// plus the three return names (so momentum updates and the final update are
// reachable even from sparse programs).
std::vector<std::string> OverwriteTargets(const Program& p) {
  std::vector<std::string> targets;
  for (std::string_view ret : Program::Returns()) targets.emplace_back(ret);
  for (const Statement& stmt : p.statements)
    if (std::find(targets.begin(), targets.end(), stmt.out) == targets.end() &&
        !Program::IsInput(stmt.out))
      targets.push_back(stmt.out);
  return targets;
}

std::string FreshName(const Program& p) {
  for (int k = 1;; ++k) {
    std::string name = "v" + std::to_string(k);
    bool taken = false;
    for (const Statement& stmt : p.statements)
      if (stmt.out == name) {
        taken = true;
        break;
      }
    if (!taken) return name;
  }
}

void InsertStatement(Program& p, const MutationConfig& cfg, Rng& rng) {
  if (static_cast<int>(p.statements.size()) >= cfg.max_statements) return;
  const std::size_t pos = rng.Index(p.statements.size() + 1);
  const auto registry = FunctionRegistry();
  const FunctionSpec& fn = registry[rng.Index(registry.size())];

  Statement stmt;
  stmt.fn = std::string(fn.name);
  const std::vector<std::string> scope = ScopeAt(p, pos);
  for (int i = 0; i < fn.arity; ++i) {
    if (rng.Bernoulli(cfg.insert_var_prob))
      stmt.args.push_back(Arg::Var(scope[rng.Index(scope.size())]));
    else
      stmt.args.push_back(Arg::Const(rng.Normal()));
  }
  if (rng.Bernoulli(cfg.fresh_output_prob)) {
    stmt.out = FreshName(p);
  } else {
    const std::vector<std::string> targets = OverwriteTargets(p);
    stmt.out = targets[rng.Index(targets.size())];
  }
  p.statements.insert(p.statements.begin() + static_cast<std::ptrdiff_t>(pos),
                      std::move(stmt));
}

void ModifyArgument(Program& p, const MutationConfig& cfg, Rng& rng) {
  std::vector<std::size_t> candidates;
  for (std::size_t i = 0; i < p.statements.size(); ++i)
    if (!p.statements[i].args.empty()) candidates.push_back(i);
  if (candidates.empty()) {
    InsertStatement(p, cfg, rng);
    return;
  }
  const std::size_t si = candidates[rng.Index(candidates.size())];
  Statement& stmt = p.statements[si];
  Arg& arg = stmt.args[rng.Index(stmt.args.size())];

  // Uniform over the applicable replacements; scaling by 2^a only applies to
  // a constant argument.
  const int options = arg.is_var() ? 2 : 3;
  switch (rng.Index(static_cast<std::size_t>(options))) {
    case 0: {
      const std::vector<std::string> scope = ScopeAt(p, si);
      arg = Arg::Var(scope[rng.Index(scope.size())]);
      break;
    }
    case 1:
      arg = Arg::Const(rng.Normal());
      break;
    default:
      arg = Arg::Const(arg.value * std::exp2(rng.Normal()));
      break;
  }
}

void MutateConstantOnly(Program& p, Rng& rng) {
  std::vector<std::pair<std::size_t, std::size_t>> constants;
  for (std::size_t i = 0; i < p.statements.size(); ++i)
    for (std::size_t j = 0; j < p.statements[i].args.size(); ++j)
      if (!p.statements[i].args[j].is_var()) constants.emplace_back(i, j);
  if (constants.empty()) return;
  const auto [si, aj] = constants[rng.Index(constants.size())];
  Arg& arg = p.statements[si].args[aj];
  if (rng.Bernoulli(0.5))
    arg = Arg::Const(rng.Normal());
  else
    arg = Arg::Const(arg.value * std::exp2(rng.Normal()));
}

}  // namespace

Program Mutate(const Program& p, const MutationConfig& cfg, Rng& rng) {
  Program child = p;
  if (cfg.constants_only) {
    MutateConstantOnly(child, rng);
    return child;
  }

  const double total = cfg.insert_weight + cfg.delete_weight + cfg.modify_weight;
  if (!(total > 0.0)) throw ValueError("mutation weights must not all be zero");
  const double pick = rng.Uniform() * total;

  if (pick < cfg.insert_weight) {
    InsertStatement(child, cfg, rng);
  } else if (pick < cfg.insert_weight + cfg.delete_weight) {
    if (child.statements.empty()) {
      InsertStatement(child, cfg, rng);
    } else {
      const std::size_t pos = rng.Index(child.statements.size());
      child.statements.erase(child.statements.begin() +
                             static_cast<std::ptrdiff_t>(pos));
    }
  } else {
    ModifyArgument(child, cfg, rng);
  }
  return child;
}

std::optional<Program> MutateUntilValid(const Program& p,
                                        const MutationConfig& cfg,
                                        const InputSignature& sig, Rng& rng) {
  for (int attempt = 0; attempt < cfg.max_retries; ++attempt) {
    Program child = Mutate(p, cfg, rng);
    if (IsValid(child, sig)) return child;
  }
  return std::nullopt;
}

Program RandomProgram(int num_statements, const MutationConfig& cfg,
                      const InputSignature& sig, Rng& rng) {
  for (;;) {
    Program p;
    for (int i = 0; i < num_statements; ++i) InsertStatement(p, cfg, rng);
    if (IsValid(p, sig)) return p;
  }
}

}  // namespace optimforge
