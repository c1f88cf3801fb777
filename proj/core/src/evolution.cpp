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

#include "optimforge/evolution.hpp"

#include <atomic>
#include <charconv>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <limits>
#include <thread>

#include "json.hpp"

#include "optimforge/abstract.hpp"

namespace optimforge {

namespace {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

std::uint64_t EvalSeed(const SearchConfig& cfg, const HashValue& hash,
                       int repeat) {
  return MixSeeds(MixSeeds(cfg.seed, hash.hi ^ hash.lo),
                  static_cast<std::uint64_t>(repeat));
}

Fitness EvaluateProgram(const Program& p, const SearchConfig& cfg,
                        const HashValue& hash) {
  if (cfg.repeats <= 1) return EvaluateFitness(p, cfg.task, EvalSeed(cfg, hash, 0));
  double sum = 0.0;
  Fitness out;
  for (int r = 0; r < cfg.repeats; ++r) {
    const Fitness f = EvaluateFitness(p, cfg.task, EvalSeed(cfg, hash, r));
    if (f.status != Fitness::Status::kOk) return f;
    sum += f.value;
  }
  out.value = sum / cfg.repeats;
  return out;
}

std::string RestartName(RestartPolicy::Kind kind) {
  switch (kind) {
    case RestartPolicy::Kind::kNone:
      return "none";
    case RestartPolicy::Kind::kFromInitial:
      return "from_initial";
    case RestartPolicy::Kind::kFromBestAfter:
      return "from_best_after";
  }
  return "none";
}

RestartPolicy::Kind RestartKind(const std::string& name) {
  if (name == "from_initial") return RestartPolicy::Kind::kFromInitial;
  if (name == "from_best_after") return RestartPolicy::Kind::kFromBestAfter;
  return RestartPolicy::Kind::kNone;
}

Json FitnessToJson(const Fitness& f) {
  // The value is kept as its shortest round-trip decimal so -inf survives
  // JSON.
  return Json{{"value", FormatConstant(f.value)},
              {"status", StatusName(f.status)}};
}

Fitness FitnessFromJson(const Json& j) {
  Fitness f;
  const std::string value = j.at("value").get<std::string>();
  // from_chars handles inf/nan spellings and subnormals without the
  // underflow exception std::stod raises.
  std::from_chars(value.data(), value.data() + value.size(), f.value);
  const std::string status = j.at("status").get<std::string>();
  if (status == "nonfinite")
    f.status = Fitness::Status::kNonfinite;
  else if (status == "timeout")
    f.status = Fitness::Status::kTimeout;
  return f;
}

Json IndividualToJson(const Individual& ind) {
  return Json{{"program", Json::parse(ProgramToJson(ind.program))},
              {"hash", ind.hash.Hex()},
              {"fitness", FitnessToJson(ind.fitness)},
              {"birth_cycle", ind.birth_cycle}};
}

Individual IndividualFromJson(const Json& j) {
  Individual ind;
  ind.program = ProgramFromJson(j.at("program").dump());
  ind.hash = HashValue::FromHex(j.at("hash").get<std::string>());
  ind.fitness = FitnessFromJson(j.at("fitness"));
  ind.birth_cycle = j.at("birth_cycle").get<std::int64_t>();
  return ind;
}

}  // namespace

std::string SearchConfigToJson(const SearchConfig& cfg) {
  Json doc;
  doc["population"] = cfg.population;
  doc["tournament"] = cfg.tournament;
  doc["budget"] = cfg.budget;
  doc["seed"] = cfg.seed;
  doc["restart"] = {{"kind", RestartName(cfg.restart.kind)},
                    {"param", cfg.restart.param}};
  doc["mutation"] = {{"insert_weight", cfg.mutation.insert_weight},
                     {"delete_weight", cfg.mutation.delete_weight},
                     {"modify_weight", cfg.mutation.modify_weight},
                     {"insert_var_prob", cfg.mutation.insert_var_prob},
                     {"fresh_output_prob", cfg.mutation.fresh_output_prob},
                     {"max_statements", cfg.mutation.max_statements},
                     {"max_retries", cfg.mutation.max_retries},
                     {"constants_only", cfg.mutation.constants_only}};
  doc["task"] = Json::parse(TaskToJson(cfg.task));
  doc["repeats"] = cfg.repeats;
  doc["random_search"] = cfg.random_search;
  doc["random_program_length"] = cfg.random_program_length;
  doc["seed_program"] = Json::parse(ProgramToJson(cfg.seed_program));
  doc["threads"] = cfg.threads;
  return doc.dump(2);
}

SearchConfig SearchConfigFromJson(std::string_view json_text) {
  const Json doc = Json::parse(json_text);
  SearchConfig cfg;
  cfg.population = doc.at("population").get<int>();
  cfg.tournament = doc.at("tournament").get<int>();
  cfg.budget = doc.at("budget").get<int>();
  cfg.seed = doc.at("seed").get<std::uint64_t>();
  cfg.restart.kind = RestartKind(doc.at("restart").at("kind").get<std::string>());
  cfg.restart.param = doc.at("restart").at("param").get<int>();
  const Json& mut = doc.at("mutation");
  cfg.mutation.insert_weight = mut.at("insert_weight").get<double>();
  cfg.mutation.delete_weight = mut.at("delete_weight").get<double>();
  cfg.mutation.modify_weight = mut.at("modify_weight").get<double>();
  cfg.mutation.insert_var_prob = mut.at("insert_var_prob").get<double>();
  cfg.mutation.fresh_output_prob = mut.at("fresh_output_prob").get<double>();
  cfg.mutation.max_statements = mut.at("max_statements").get<int>();
  cfg.mutation.max_retries = mut.at("max_retries").get<int>();
  cfg.mutation.constants_only = mut.at("constants_only").get<bool>();
  cfg.task = TaskFromJson(doc.at("task").dump());
  cfg.repeats = doc.at("repeats").get<int>();
  cfg.random_search = doc.at("random_search").get<bool>();
  cfg.random_program_length = doc.at("random_program_length").get<int>();
  cfg.seed_program = ProgramFromJson(doc.at("seed_program").dump());
  cfg.threads = doc.at("threads").get<int>();
  return cfg;
}

std::string FormatLogLine(const CycleRecord& r) {
  std::string line = "{\"cycle\":" + std::to_string(r.cycle);
  line += ",\"parent_hash\":\"" + r.parent_hash.Hex() + "\"";
  line += ",\"child_hash\":\"" + r.child_hash.Hex() + "\"";
  line += std::string(",\"cache_hit\":") + (r.cache_hit ? "true" : "false");
  line += std::string(",\"raw_hit\":") + (r.raw_hit ? "true" : "false");
  if (r.fitness.status == Fitness::Status::kOk)
    line += ",\"fitness\":" + FormatConstant(r.fitness.value);
  else
    line += ",\"fitness\":null";
  line += std::string(",\"status\":\"") + StatusName(r.fitness.status) + "\"";
  line += ",\"statements\":" + std::to_string(r.statements);
  line += ",\"live_statements\":" + std::to_string(r.live_statements);
  line += "}";
  return line;
}

SearchState InitPopulation(const Program& seed_program, const SearchConfig& cfg) {
  if (cfg.population < 1 || cfg.tournament < 2 ||
      cfg.tournament >= cfg.population)
    throw ValueError("search requires 2 <= tournament < population");
  const InputSignature sig = TaskSignature(cfg.task);
  Infer(seed_program, sig);  // configuration error if the seed is invalid

  SearchState state;
  state.rng = Rng(MixSeeds(cfg.seed, 0xe7012f5a1c03b86dULL));
  Individual ind;
  ind.program = seed_program;
  ind.hash = FunctionalHash(seed_program, sig);
  ind.fitness = EvaluateProgram(seed_program, cfg, ind.hash);
  ind.birth_cycle = 0;
  state.cache[ind.hash] = ind.fitness;
  state.raw_seen.insert(FunctionalHash(seed_program, sig, false));
  state.counters.evaluations = 1;
  state.best = ind;
  for (int i = 0; i < cfg.population; ++i) state.population.push_back(ind);
  return state;
}

CycleRecord Cycle(SearchState& state, const SearchConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  const InputSignature sig = TaskSignature(cfg.task);
  CycleRecord record;

  Program child;
  for (;;) {
    // Tournament: T uniform samples, fittest wins, ties to the most recently
    // added (largest queue index; the back of the queue is newest).
    std::size_t parent_idx = state.rng.Index(state.population.size());
    for (int t = 1; t < cfg.tournament; ++t) {
      const std::size_t idx = state.rng.Index(state.population.size());
      const Fitness& cand = state.population[idx].fitness;
      const Fitness& cur = state.population[parent_idx].fitness;
      if (FitnessLess(cur, cand) ||
          (!FitnessLess(cand, cur) && idx > parent_idx))
        parent_idx = idx;
    }
    const Individual& parent = state.population[parent_idx];
    record.parent_hash = parent.hash;

    if (cfg.random_search) {
      child = RandomProgram(cfg.random_program_length, cfg.mutation, sig,
                            state.rng);
      break;
    }
    std::optional<Program> mutated =
        MutateUntilValid(parent.program, cfg.mutation, sig, state.rng);
    if (mutated.has_value()) {
      child = std::move(*mutated);
      break;
    }
    // Retry budget exhausted: resample a parent and keep going.
    state.counters.retry_exhausted += 1;
  }

  Individual ind;
  ind.program = std::move(child);
  ind.hash = FunctionalHash(ind.program, sig);
  const HashValue raw = FunctionalHash(ind.program, sig, false);
  record.raw_hit = !state.raw_seen.insert(raw).second;

  const auto cached = state.cache.find(ind.hash);
  record.cache_hit = cached != state.cache.end();
  if (record.cache_hit) {
    ind.fitness = cached->second;
  } else {
    ind.fitness = EvaluateProgram(ind.program, cfg, ind.hash);
    state.cache.emplace(ind.hash, ind.fitness);
    state.counters.evaluations += 1;
  }
  if (record.cache_hit) state.counters.cache_hits += 1;
  if (record.raw_hit) state.counters.raw_cache_hits += 1;

  state.cycle += 1;
  ind.birth_cycle = state.cycle;
  if (FitnessLess(state.best.fitness, ind.fitness)) state.best = ind;

  record.cycle = state.cycle;
  record.child_hash = ind.hash;
  record.fitness = ind.fitness;
  record.statements = static_cast<int>(ind.program.statements.size());
  record.live_statements = static_cast<int>(LiveStatements(ind.program).size());
  state.counters.children += 1;
  state.counters.statements_total += record.statements;
  state.counters.live_statements_total += record.live_statements;

  state.population.push_back(std::move(ind));
  state.population.pop_front();

  record.wall_ms = std::chrono::duration<double, std::milli>(
                       std::chrono::steady_clock::now() - t0)
                       .count();
  return record;
}

namespace {

Json CountersToJson(const SearchCounters& c) {
  return Json{{"children", c.children},
              {"evaluations", c.evaluations},
              {"cache_hits", c.cache_hits},
              {"raw_cache_hits", c.raw_cache_hits},
              {"retry_exhausted", c.retry_exhausted},
              {"statements_total", c.statements_total},
              {"live_statements_total", c.live_statements_total}};
}

SearchCounters CountersFromJson(const Json& j) {
  SearchCounters c;
  c.children = j.at("children").get<std::int64_t>();
  c.evaluations = j.at("evaluations").get<std::int64_t>();
  c.cache_hits = j.at("cache_hits").get<std::int64_t>();
  c.raw_cache_hits = j.at("raw_cache_hits").get<std::int64_t>();
  c.retry_exhausted = j.at("retry_exhausted").get<std::int64_t>();
  c.statements_total = j.at("statements_total").get<std::int64_t>();
  c.live_statements_total = j.at("live_statements_total").get<std::int64_t>();
  return c;
}

Json StateToJson(const SearchState& state) {
  Json doc;
  doc["cycle"] = state.cycle;
  doc["rng"] = state.rng.State();
  doc["counters"] = CountersToJson(state.counters);
  doc["best"] = IndividualToJson(state.best);
  Json pop = Json::array();
  for (const Individual& ind : state.population) pop.push_back(IndividualToJson(ind));
  doc["population"] = std::move(pop);
  Json cache = Json::array();
  for (const auto& [hash, fitness] : state.cache)
    cache.push_back(Json{{"hash", hash.Hex()}, {"fitness", FitnessToJson(fitness)}});
  doc["cache"] = std::move(cache);
  Json raw = Json::array();
  for (const HashValue& h : state.raw_seen) raw.push_back(h.Hex());
  doc["raw_seen"] = std::move(raw);
  return doc;
}

SearchState StateFromJson(const Json& doc) {
  SearchState state;
  state.cycle = doc.at("cycle").get<std::int64_t>();
  state.rng.SetState(doc.at("rng").get<std::array<std::uint64_t, 4>>());
  state.counters = CountersFromJson(doc.at("counters"));
  state.best = IndividualFromJson(doc.at("best"));
  for (const Json& j : doc.at("population"))
    state.population.push_back(IndividualFromJson(j));
  for (const Json& j : doc.at("cache"))
    state.cache[HashValue::FromHex(j.at("hash").get<std::string>())] =
        FitnessFromJson(j.at("fitness"));
  for (const Json& j : doc.at("raw_seen"))
    state.raw_seen.insert(HashValue::FromHex(j.get<std::string>()));
  return state;
}

// Sink for run-directory files; everything is a no-op when out_dir is empty.
class RunDirectory {
 public:
  RunDirectory(const SearchConfig& cfg, bool resume) : cfg_(cfg) {
    if (cfg.out_dir.empty()) return;
    enabled_ = true;
    fs::create_directories(cfg.out_dir);
    log_path_ = (fs::path(cfg.out_dir) / "log.jsonl").string();
    timings_path_ = (fs::path(cfg.out_dir) / "timings.jsonl").string();
    ckpt_path_ = (fs::path(cfg.out_dir) / "population.ckpt").string();
    if (!resume) {
      std::ofstream config_out(fs::path(cfg.out_dir) / "config.json",
                               std::ios::trunc);
      config_out << SearchConfigToJson(cfg) << "\n";
    }
    log_.open(log_path_, resume ? std::ios::app : std::ios::trunc);
    timings_.open(timings_path_, resume ? std::ios::app : std::ios::trunc);
  }

  void Append(const CycleRecord& record) {
    if (!enabled_) return;
    log_ << FormatLogLine(record) << "\n";
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.3f", record.wall_ms);
    timings_ << "{\"cycle\":" << record.cycle << ",\"wall_ms\":" << buf << "}\n";
  }

  void Checkpoint(const Json& doc) {
    if (!enabled_) return;
    log_.flush();
    timings_.flush();
    Json full = doc;
    full["log_bytes"] = static_cast<std::int64_t>(fs::file_size(log_path_));
    full["timings_bytes"] = static_cast<std::int64_t>(fs::file_size(timings_path_));
    const std::string tmp = ckpt_path_ + ".tmp";
    {
      std::ofstream out(tmp, std::ios::trunc);
      out << full.dump() << "\n";
    }
    fs::rename(tmp, ckpt_path_);
  }

  void WriteBest(const Program& best) {
    if (!enabled_) return;
    std::ofstream out(fs::path(cfg_.out_dir) / "best.prog", std::ios::trunc);
    out << PrintProgram(best);
  }

  std::string log_path() const { return log_path_; }

 private:
  const SearchConfig& cfg_;
  bool enabled_ = false;
  std::string log_path_, timings_path_, ckpt_path_;
  std::ofstream log_, timings_;
};

struct ResumeInfo {
  bool valid = false;
  bool complete = false;
  int segment = 0;  // completed independent runs (from_initial)
  std::int64_t children_done = 0;
  Json state;
  Json extra;  // policy-specific payload (e.g. per-run bests)
};

ResumeInfo TryLoadCheckpoint(const SearchConfig& cfg) {
  ResumeInfo info;
  if (cfg.out_dir.empty()) return info;
  const fs::path ckpt = fs::path(cfg.out_dir) / "population.ckpt";
  if (!fs::exists(ckpt)) return info;
  Json doc;
  try {
    std::ifstream in(ckpt);
    in >> doc;
  } catch (...) {
    return info;
  }
  if (doc.value("version", 0) != 1) return info;
  // The budget may grow between invocations (that is what resuming is for);
  // thread count is an execution detail. Everything else must match.
  Json stored = doc.at("config");
  Json current = Json::parse(SearchConfigToJson(cfg));
  stored.erase("budget");
  stored.erase("threads");
  current.erase("budget");
  current.erase("threads");
  if (stored.dump() != current.dump()) return info;  // start fresh
  info.valid = true;
  info.complete = doc.at("complete").get<bool>();
  info.segment = doc.at("segment").get<int>();
  info.children_done = doc.at("children_done").get<std::int64_t>();
  if (doc.contains("state")) info.state = doc.at("state");
  if (doc.contains("extra")) info.extra = doc.at("extra");

  // Drop any log lines written after the checkpoint so the resumed log is
  // byte-identical to an uninterrupted run.
  const fs::path log = fs::path(cfg.out_dir) / "log.jsonl";
  const fs::path timings = fs::path(cfg.out_dir) / "timings.jsonl";
  if (fs::exists(log))
    fs::resize_file(log, doc.at("log_bytes").get<std::uint64_t>());
  if (fs::exists(timings))
    fs::resize_file(timings, doc.at("timings_bytes").get<std::uint64_t>());
  return info;
}

Json CheckpointDoc(const SearchConfig& cfg, int segment,
                   std::int64_t children_done, bool complete) {
  Json doc;
  doc["version"] = 1;
  doc["config"] = Json::parse(SearchConfigToJson(cfg));
  doc["segment"] = segment;
  doc["children_done"] = children_done;
  doc["complete"] = complete;
  return doc;
}

constexpr std::int64_t kCheckpointEvery = 1000;

}  // namespace

SearchResult RunSearch(const SearchConfig& cfg) {
  ResumeInfo resume = TryLoadCheckpoint(cfg);
  RunDirectory dir(cfg, resume.valid);

  if (cfg.restart.kind == RestartPolicy::Kind::kFromInitial &&
      cfg.restart.param > 1) {
    // Independent runs with derived seeds; the overall best wins. Runs are
    // deterministic in isolation, so they may execute on worker threads while
    // logs are written in run order.
    const int runs = cfg.restart.param;
    int done = resume.valid ? resume.segment : 0;
    std::vector<Individual> bests;
    if (resume.valid && !resume.extra.is_null())
      for (const Json& j : resume.extra) bests.push_back(IndividualFromJson(j));

    for (int base = done; base < runs;) {
      const int batch = std::min(std::max(1, cfg.threads), runs - base);
      std::vector<std::vector<CycleRecord>> records(batch);
      std::vector<SearchState> states(batch);
      std::vector<std::thread> pool;
      for (int i = 0; i < batch; ++i)
        pool.emplace_back([&, i]() {
          SearchConfig sub = cfg;
          sub.out_dir.clear();
          sub.restart = RestartPolicy{};
          sub.seed = MixSeeds(cfg.seed, static_cast<std::uint64_t>(base + i + 1));
          states[i] = InitPopulation(cfg.seed_program, sub);
          records[i].reserve(static_cast<std::size_t>(sub.budget));
          for (int c = 0; c < sub.budget; ++c)
            records[i].push_back(Cycle(states[i], sub));
        });
      for (std::thread& t : pool) t.join();
      for (int i = 0; i < batch; ++i) {
        for (const CycleRecord& r : records[i]) dir.Append(r);
        bests.push_back(states[i].best);
        Json doc = CheckpointDoc(cfg, base + i + 1,
                                 static_cast<std::int64_t>(base + i + 1) *
                                     cfg.budget,
                                 base + i + 1 == runs);
        Json extra = Json::array();
        for (const Individual& b : bests) extra.push_back(IndividualToJson(b));
        doc["extra"] = std::move(extra);
        if (base + i + 1 == runs) doc["state"] = StateToJson(states[i]);
        dir.Checkpoint(doc);
      }
      base += batch;
    }

    SearchResult result;
    result.state = resume.valid && resume.complete && !resume.state.is_null()
                       ? StateFromJson(resume.state)
                       : SearchState{};
    result.best = bests.front();
    for (const Individual& b : bests)
      if (FitnessLess(result.best.fitness, b.fitness)) result.best = b;
    dir.WriteBest(result.best.program);
    result.log_path = dir.log_path();
    return result;
  }

  // Single-trajectory policies: none and from_best_after(n).
  SearchState state;
  std::int64_t done = 0;
  if (resume.valid && !resume.state.is_null()) {
    state = StateFromJson(resume.state);
    done = resume.children_done;
  } else {
    state = InitPopulation(cfg.seed_program, cfg);
  }

  const std::int64_t segment = cfg.restart.kind ==
                                       RestartPolicy::Kind::kFromBestAfter &&
                                       cfg.restart.param > 0
                                   ? cfg.restart.param
                                   : std::numeric_limits<std::int64_t>::max();
  std::int64_t next_restart =
      segment == std::numeric_limits<std::int64_t>::max()
          ? segment
          : ((done / segment) + 1) * segment;

  while (done < cfg.budget) {
    const CycleRecord record = Cycle(state, cfg);
    dir.Append(record);
    ++done;
    if (done == next_restart && done < cfg.budget) {
      // Re-seed the whole population from the best-so-far for exploitation.
      Individual seed = state.best;
      seed.birth_cycle = state.cycle;
      state.population.assign(static_cast<std::size_t>(cfg.population), seed);
      next_restart += segment;
    }
    if (done % kCheckpointEvery == 0 || done == cfg.budget) {
      Json doc = CheckpointDoc(cfg, 0, done, done == cfg.budget);
      doc["state"] = StateToJson(state);
      dir.Checkpoint(doc);
    }
  }
  if (cfg.budget == 0) {
    Json doc = CheckpointDoc(cfg, 0, 0, true);
    doc["state"] = StateToJson(state);
    dir.Checkpoint(doc);
  }

  dir.WriteBest(state.best.program);
  SearchResult result;
  result.best = state.best;
  result.state = std::move(state);
  result.log_path = dir.log_path();
  return result;
}

}  // namespace optimforge
