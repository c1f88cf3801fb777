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

#include "optimforge/simplify.hpp"

#include <algorithm>
#include <limits>

#include "json.hpp"

#include "optimforge/abstract.hpp"

namespace optimforge {

Program PruneByFitness(const Program& p, const ProxyTask& task,
                       double eps_prune, std::uint64_t seed,
                       SimplifyReport* report) {
  const InputSignature sig = TaskSignature(task);
  Infer(p, sig);
  Fitness current = EvaluateFitness(p, task, seed);
  if (current.status != Fitness::Status::kOk)
    throw ValueError(std::string("prune baseline fitness is ") +
                     StatusName(current.status) +
                     "; cannot measure deletion deltas");
  if (report != nullptr) report->baseline = current;

  Program pruned = p;
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t i = 0; i < pruned.statements.size(); ++i) {
      Program candidate = pruned;
      candidate.statements.erase(candidate.statements.begin() +
                                 static_cast<std::ptrdiff_t>(i));
      SimplifyReport::Deletion entry;
      entry.index = static_cast<int>(i);
      entry.out = pruned.statements[i].out;
      entry.fn = pruned.statements[i].fn;
      entry.valid = IsValid(candidate, sig);
      if (entry.valid) {
        const Fitness f = EvaluateFitness(candidate, task, seed);
        const double delta = f.status == Fitness::Status::kOk
                                 ? current.value - f.value
                                 : std::numeric_limits<double>::infinity();
        entry.delta = delta;
        if (f.status == Fitness::Status::kOk && delta <= eps_prune) {
          entry.kept = true;
          pruned = std::move(candidate);
          current = f;
          changed = true;
        }
      }
      if (report != nullptr) report->deletions.push_back(entry);
      if (entry.kept) {
        // The statement list shifted left; re-examine the same index.
        --i;
      }
    }
  }
  if (report != nullptr) {
    report->final_fitness = current;
    report->cumulative_delta = report->baseline.value - current.value;
  }
  return pruned;
}

Program Canonicalize(const Program& p) {
  Program stripped = StripRedundant(p);

  // Index of the final producer of each return name, if any.
  std::vector<std::ptrdiff_t> final_producer(Program::Returns().size(), -1);
  for (std::size_t i = 0; i < stripped.statements.size(); ++i) {
    const auto& returns = Program::Returns();
    for (std::size_t r = 0; r < returns.size(); ++r)
      if (stripped.statements[i].out == returns[r])
        final_producer[r] = static_cast<std::ptrdiff_t>(i);
  }

  // Flow-sensitive rename: old name -> current new name.
  std::vector<std::pair<std::string, std::string>> env;
  for (std::string_view input : Program::Inputs())
    env.emplace_back(input, input);
  auto lookup = [&](const std::string& name) -> const std::string& {
    for (auto it = env.rbegin(); it != env.rend(); ++it)
      if (it->first == name) return it->second;
    throw ValueError("use of undefined variable '" + name + "'");
  };
  auto bind = [&](const std::string& name, std::string renamed) {
    for (auto& [key, value] : env) {
      if (key == name) {
        value = std::move(renamed);
        return;
      }
    }
    env.emplace_back(name, std::move(renamed));
  };

  Program out;
  int counter = 0;
  for (std::size_t i = 0; i < stripped.statements.size(); ++i) {
    Statement stmt = stripped.statements[i];
    for (Arg& a : stmt.args)
      if (a.is_var()) a.var = lookup(a.var);

    std::string new_name;
    const auto& returns = Program::Returns();
    for (std::size_t r = 0; r < returns.size(); ++r)
      if (final_producer[r] == static_cast<std::ptrdiff_t>(i))
        new_name = std::string(returns[r]);
    if (new_name.empty()) new_name = "v" + std::to_string(++counter);

    bind(stmt.out, new_name);
    stmt.out = std::move(new_name);
    out.statements.push_back(std::move(stmt));
  }
  return out;
}

SimplifyReport Simplify(const Program& p, const ProxyTask& task,
                        double eps_prune, std::uint64_t seed) {
  SimplifyReport report;
  report.original_statements = static_cast<int>(p.statements.size());
  const Program stripped = StripRedundant(p);
  report.stripped_statements = static_cast<int>(stripped.statements.size());
  const Program pruned =
      StripRedundant(PruneByFitness(stripped, task, eps_prune, seed, &report));
  report.pruned_statements = static_cast<int>(pruned.statements.size());
  report.canonical = Canonicalize(pruned);
  return report;
}

std::string SimplifyReportToJson(const SimplifyReport& report) {
  nlohmann::ordered_json doc;
  doc["original_statements"] = report.original_statements;
  doc["stripped_statements"] = report.stripped_statements;
  doc["pruned_statements"] = report.pruned_statements;
  doc["baseline_fitness"] = {{"value", FormatConstant(report.baseline.value)},
                             {"status", StatusName(report.baseline.status)}};
  doc["final_fitness"] = {{"value", FormatConstant(report.final_fitness.value)},
                          {"status", StatusName(report.final_fitness.status)}};
  doc["cumulative_delta"] = FormatConstant(report.cumulative_delta);
  doc["deletions"] = nlohmann::ordered_json::array();
  for (const SimplifyReport::Deletion& d : report.deletions)
    doc["deletions"].push_back({{"index", d.index},
                                {"out", d.out},
                                {"fn", d.fn},
                                {"valid", d.valid},
                                {"delta", FormatConstant(d.delta)},
                                {"kept", d.kept}});
  doc["canonical"] = PrintProgram(report.canonical);
  return doc.dump(2);
}

}  // namespace optimforge
