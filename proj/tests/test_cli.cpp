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

#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "optimforge/assets.hpp"
#include "optimforge/program.hpp"

namespace optimforge {
namespace {

namespace fs = std::filesystem;

struct CommandResult {
  int exit_code = -1;
  std::string output;  // stdout + stderr
};

CommandResult Run(const std::string& args) {
  const std::string cmd = std::string(OPTIMFORGE_CLI_PATH) + " " + args + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  CommandResult result;
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof(buf), pipe)) > 0)
    result.output.append(buf, n);
  const int status = pclose(pipe);
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return result;
}

TEST_SUITE_BEGIN("cli");

TEST_CASE("hash prints 32 hex digits for assets and files") {
  const CommandResult r = Run("hash lion");
  CHECK(r.exit_code == 0);
  CHECK(r.output.size() == 33);  // 32 hex + newline

  const fs::path tmp = fs::temp_directory_path() / "of_cli_lion.prog";
  std::ofstream(tmp) << assets::Lion();
  const CommandResult file = Run("hash " + tmp.string());
  CHECK(file.exit_code == 0);
  CHECK(file.output == r.output);
  fs::remove(tmp);

  // Raw hashing is a distinct digest for programs with commutative calls.
  const CommandResult raw = Run("hash adamw --raw");
  const CommandResult canon = Run("hash adamw");
  CHECK(raw.exit_code == 0);
  CHECK(raw.output.size() == 33);
  CHECK(canon.exit_code == 0);
}

TEST_CASE("strip reproduces the discovered program from the raw one") {
  const CommandResult r = Run("strip raw");
  CHECK(r.exit_code == 0);
  const Program printed = ParseProgram(r.output);
  CHECK(printed.statements.size() == 13);
}

TEST_CASE("eval emits a fitness json line") {
  const CommandResult r = Run("eval adamw --task quadratic");
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("\"status\":\"ok\"") != std::string::npos);
  CHECK(r.output.find("\"fitness\":") != std::string::npos);
}

TEST_CASE("bad inputs give exit code 1 with a usage-style error") {
  CHECK(Run("eval no_such_program_anywhere").exit_code == 1);
  CHECK(Run("eval adamw --task no-such-task").exit_code == 1);
  CHECK(Run("hash /nonexistent/path.prog").exit_code == 1);
  CHECK(Run("train --preset made-up --optimizer lion").exit_code == 1);

  const fs::path tmp = fs::temp_directory_path() / "of_cli_bad.prog";
  std::ofstream(tmp) << "def train(w, g, m, v, lr):\n  update = wat(g)\n"
                        "  return update, m, v\n";
  const CommandResult r = Run("hash " + tmp.string());
  CHECK(r.exit_code == 1);
  CHECK(r.output.find("error") != std::string::npos);
  fs::remove(tmp);
}

TEST_CASE("estimate-space matches the library") {
  const CommandResult r =
      Run("estimate-space --functions 10 --variables 10 --arity 2 --length 3");
  CHECK(r.exit_code == 0);
  CHECK(r.output == "1000000000\n");
}

TEST_CASE("train writes metrics jsonl with decreasing loss") {
  const CommandResult r =
      Run("train --optimizer adamw --task quadratic --steps 50 --lr 0.05");
  CHECK(r.exit_code == 0);
  std::istringstream lines(r.output);
  std::string first, line, last;
  int count = 0;
  while (std::getline(lines, line)) {
    if (count == 0) first = line;
    last = line;
    ++count;
  }
  CHECK(count == 50);
  CHECK(first.find("\"step\":0") != std::string::npos);
  CHECK(first.find("\"loss\":") != std::string::npos);
  CHECK(last.find("\"step\":49") != std::string::npos);

  // A DSL program can be trained the same way.
  const CommandResult lion =
      Run("train --optimizer lion --task quadratic --steps 10 --lr 0.01");
  CHECK(lion.exit_code == 0);
  const CommandResult prog =
      Run("train --optimizer discovered --task quadratic --steps 10");
  CHECK(prog.exit_code == 0);
}

TEST_CASE("search rerun from the emitted config reproduces the log") {
  const fs::path dir1 = fs::temp_directory_path() / "of_cli_s1";
  const fs::path dir2 = fs::temp_directory_path() / "of_cli_s2";
  fs::remove_all(dir1);
  fs::remove_all(dir2);

  const CommandResult r1 = Run(
      "search --task quadratic --population 10 --budget 40 --seed 3 --out " +
      dir1.string());
  CHECK(r1.exit_code == 0);
  CHECK(r1.output.find("best_hash") != std::string::npos);

  const CommandResult r2 =
      Run("search --config " + (dir1 / "config.json").string() + " --out " +
          dir2.string());
  CHECK(r2.exit_code == 0);

  std::ifstream a(dir1 / "log.jsonl"), b(dir2 / "log.jsonl");
  std::stringstream sa, sb;
  sa << a.rdbuf();
  sb << b.rdbuf();
  CHECK(sa.str() == sb.str());
  CHECK(!sa.str().empty());
  fs::remove_all(dir1);
  fs::remove_all(dir2);
}

TEST_CASE("simplify emits a report") {
  const CommandResult r = Run("simplify raw --task quadratic");
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("\"canonical\"") != std::string::npos);
}

TEST_CASE("funnel reports survivors per level") {
  const CommandResult r = Run("funnel lion --baseline adamw --task quadratic "
                              "--levels AB");
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("\"level\":\"A\"") != std::string::npos);
  CHECK(r.output.find("\"survivors\"") != std::string::npos);
}

TEST_SUITE_END();

}  // namespace
}  // namespace optimforge
