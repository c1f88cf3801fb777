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

#ifndef OPTIMFORGE_EVOLUTION_HPP_
#define OPTIMFORGE_EVOLUTION_HPP_

#include <cstdint>
#include <deque>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "optimforge/hash128.hpp"
#include "optimforge/mutation.hpp"
#include "optimforge/program.hpp"
#include "optimforge/rng.hpp"
#include "optimforge/task.hpp"

namespace optimforge {

struct Individual {
  Program program;
  HashValue hash;
  Fitness fitness;
  std::int64_t birth_cycle = 0;
};

struct RestartPolicy {
  enum class Kind { kNone, kFromInitial, kFromBestAfter };
  Kind kind = Kind::kNone;
  // from_initial: number of independent runs; from_best_after: children per
  // segment before re-seeding the population from the best-so-far.
  int param = 0;
};

struct SearchConfig {
  int population = 1000;
  int tournament = 2;
  int budget = 0;  // children to generate
  std::uint64_t seed = 0;
  RestartPolicy restart;
  MutationConfig mutation;
  ProxyTask task;
  Program seed_program;  // warm-start program (typically AdamW)
  int repeats = 1;  // fitness averages over this many derived seeds
  // Baseline arm: children are fresh random programs instead of mutants.
  bool random_search = false;
  int random_program_length = 12;
  std::string out_dir;  // empty disables run-directory output
  int threads = 1;
};

std::string SearchConfigToJson(const SearchConfig& cfg);
SearchConfig SearchConfigFromJson(std::string_view json_text);

struct SearchCounters {
  std::int64_t children = 0;
  std::int64_t evaluations = 0;
  std::int64_t cache_hits = 0;
  std::int64_t raw_cache_hits = 0;  // hits without commutative canonicalization
  std::int64_t retry_exhausted = 0;
  std::int64_t statements_total = 0;
  std::int64_t live_statements_total = 0;
};

struct SearchState {
  std::deque<Individual> population;  // front = oldest
  std::unordered_map<HashValue, Fitness, HashValueHasher> cache;
  std::unordered_set<HashValue, HashValueHasher> raw_seen;
  Individual best;
  SearchCounters counters;
  std::int64_t cycle = 0;
  Rng rng{0};
};

// One log.jsonl record. wall_ms goes to the timings sidecar so the main log
// is byte-reproducible.
struct CycleRecord {
  std::int64_t cycle = 0;
  HashValue parent_hash;
  HashValue child_hash;
  bool cache_hit = false;
  bool raw_hit = false;
  Fitness fitness;
  int statements = 0;
  int live_statements = 0;
  double wall_ms = 0.0;
};

// Deterministic single-line JSON for log.jsonl (excludes wall_ms).
std::string FormatLogLine(const CycleRecord& r);

// Population warm-started with P copies of the seed program; one evaluation,
// shared cached fitness.
SearchState InitPopulation(const Program& seed_program, const SearchConfig& cfg);

// One regularized-evolution cycle: tournament parent, mutate-until-valid,
// cached or fresh fitness, append child, evict oldest.
CycleRecord Cycle(SearchState& state, const SearchConfig& cfg);

struct SearchResult {
  Individual best;
  SearchState state;
  std::string log_path;  // empty when out_dir is unset
};

// Runs budget cycles under the configured restart policy, writing config.json,
// log.jsonl, timings.jsonl, population.ckpt, and best.prog when out_dir is
// set. Interrupted runs resume from population.ckpt.
SearchResult RunSearch(const SearchConfig& cfg);

}  // namespace optimforge

#endif  // OPTIMFORGE_EVOLUTION_HPP_
