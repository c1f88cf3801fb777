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

#ifndef OPTIMFORGE_SIMPLIFY_HPP_
#define OPTIMFORGE_SIMPLIFY_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "optimforge/program.hpp"
#include "optimforge/task.hpp"

namespace optimforge {

struct SimplifyReport {
  int original_statements = 0;
  int stripped_statements = 0;
  int pruned_statements = 0;

  // One entry per tentative single-statement deletion the pruner evaluated.
  struct Deletion {
    int index = 0;        // statement index at evaluation time
    std::string out;      // variable the statement assigned
    std::string fn;
    bool valid = false;   // deletion kept the program well-typed
    double delta = 0.0;   // fitness drop caused by the deletion
    bool kept = false;    // deletion was accepted
  };
  std::vector<Deletion> deletions;

  Fitness baseline;
  Fitness final_fitness;
  double cumulative_delta = 0.0;
  Program canonical;
};

std::string SimplifyReportToJson(const SimplifyReport& report);

inline constexpr double kDefaultPruneEpsilon = 0.002;

// Greedy fitness-preserving pruning: repeatedly deletes any single statement
// whose removal keeps the program valid and costs at most eps_prune fitness,
// until a full pass deletes nothing. Throws ValueError when the baseline
// fitness is not ok.
Program PruneByFitness(const Program& p, const ProxyTask& task,
                       double eps_prune, std::uint64_t seed,
                       SimplifyReport* report = nullptr);

// strip_redundant + stable order + rename to v1..vk in definition order; the
// final producer of each return keeps the return name. Functional-hash
// preserving and idempotent.
Program Canonicalize(const Program& p);

// Full pipeline: strip, prune, strip again, canonicalize; returns the report
// with the canonical program.
SimplifyReport Simplify(const Program& p, const ProxyTask& task,
                        double eps_prune, std::uint64_t seed);

}  // namespace optimforge

#endif  // OPTIMFORGE_SIMPLIFY_HPP_
