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

#ifndef OPTIMFORGE_MUTATION_HPP_
#define OPTIMFORGE_MUTATION_HPP_

#include <optional>

#include "optimforge/abstract.hpp"
#include "optimforge/program.hpp"
#include "optimforge/rng.hpp"

namespace optimforge {

struct MutationConfig {
  // Relative weights of the three mutation kinds. Nonnegative, not all zero.
  double insert_weight = 1.0;
  double delete_weight = 1.0;
  double modify_weight = 1.0;

  // An inserted argument is an existing variable with this probability,
  // otherwise a fresh standard-normal constant.
  double insert_var_prob = 0.8;

  // An inserted statement writes to a fresh name v<k> with this probability,
  // otherwise it overwrites a random existing non-input variable.
  double fresh_output_prob = 0.5;

  // Statement cap; insert becomes a no-op at the cap and the validity loop
  // retries.
  int max_statements = kDefaultMaxStatements;

  // Retry budget for MutateUntilValid.
  int max_retries = 100;

  // Tuning-only ablation arm: the program structure is frozen and only
  // constant arguments mutate (fresh normal or 2^a scaling).
  bool constants_only = false;
};

// Applies exactly one mutation. The result may be invalid; validity is the
// caller's concern.
Program Mutate(const Program& p, const MutationConfig& cfg, Rng& rng);

// Mutates until Infer accepts, up to cfg.max_retries attempts.
std::optional<Program> MutateUntilValid(const Program& p,
                                        const MutationConfig& cfg,
                                        const InputSignature& sig, Rng& rng);

// A valid random program built by inserting num_statements random statements
// into the empty program (used by the random-search baseline arm).
Program RandomProgram(int num_statements, const MutationConfig& cfg,
                      const InputSignature& sig, Rng& rng);

}  // namespace optimforge

#endif  // OPTIMFORGE_MUTATION_HPP_
