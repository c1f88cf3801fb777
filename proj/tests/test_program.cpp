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

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>

#include "doctest.h"
#include "optimforge/assets.hpp"
#include "optimforge/program.hpp"

namespace optimforge {
namespace {

std::string ReadFileOrEmpty(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return {};
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

TEST_SUITE_BEGIN("program");

TEST_CASE("parse the simplest program") {
  const Program p = ParseProgram(
      "def train(w, g, m, v, lr):\n"
      "  update = g * lr\n"
      "  return update, m, v\n");
  REQUIRE(p.statements.size() == 1);
  CHECK(p.statements[0].out == "update");
  CHECK(p.statements[0].fn == "*");
  REQUIRE(p.statements[0].args.size() == 2);
  CHECK(p.statements[0].args[0] == Arg::Var("g"));
  CHECK(p.statements[0].args[1] == Arg::Var("lr"));
}

TEST_CASE("print-parse round trip on every embedded asset") {
  for (const auto& [name, text] : assets::All()) {
    CAPTURE(name);
    const Program p = ParseProgram(text);
    const std::string printed = PrintProgram(p);
    const Program again = ParseProgram(printed);
    CHECK(again == p);
    // The printed form is the canonical fixed point.
    CHECK(PrintProgram(again) == printed);
  }
}

TEST_CASE("program files mirror the embedded assets byte for byte") {
  for (const auto& [name, text] : assets::All()) {
    CAPTURE(name);
    const std::string path = std::string(OPTIMFORGE_SOURCE_DIR "/programs/") +
                             std::string(name) + ".prog";
    CHECK(ReadFileOrEmpty(path) == text);
  }
}

TEST_CASE("aliases are canonicalized at parse time") {
  const Program p = ParseProgram(
      "def train(w, g, m, v, lr):\n"
      "  m = interp(g, m, 0.9)\n"
      "  m = clip(m, lr)\n"
      "  m = min(m, g)\n"
      "  update = max(m, g)\n"
      "  return update, m, v\n");
  CHECK(p.statements[0].fn == "interpolate");
  CHECK(p.statements[1].fn == "clip_by_global_norm");
  CHECK(p.statements[2].fn == "minimum");
  CHECK(p.statements[3].fn == "maximum");
}

TEST_CASE("infix sugar and call form are interchangeable") {
  const Program a = ParseProgram(
      "def train(w, g, m, v, lr):\n"
      "  update = g * lr\n"
      "  return update, m, v\n");
  // No named "+"-style call form exists in the grammar; multiply via infix
  // with a constant operand on either side must parse.
  const Program b = ParseProgram(
      "def train(w, g, m, v, lr):\n"
      "  update = 2.0 * g\n"
      "  update = update - g\n"
      "  update = update / 1.0\n"
      "  update = update + 0.0\n"
      "  return update, m, v\n");
  CHECK(a.statements[0].fn == b.statements[0].fn);
  CHECK(b.statements[0].args[0] == Arg::Const(2.0));
  CHECK(b.statements[3].args[1] == Arg::Const(0.0));
}

TEST_CASE("parse errors carry kind, line and column") {
  const auto expect_error = [](const std::string& text, ParseError::Kind kind,
                               int line) {
    try {
      ParseProgram(text);
      FAIL("expected a parse error");
    } catch (const ParseError& e) {
      CHECK(e.kind == kind);
      CHECK(e.line == line);
      CHECK(e.column >= 1);
    }
  };

  expect_error("def train(w, g):\n  return update, m, v\n",
               ParseError::Kind::kSyntax, 1);
  expect_error(
      "def train(w, g, m, v, lr):\n"
      "  update = frobnicate(g)\n"
      "  return update, m, v\n",
      ParseError::Kind::kUnknownFunction, 2);
  expect_error(
      "def train(w, g, m, v, lr):\n"
      "  update = sqrt(zoom)\n"
      "  return update, m, v\n",
      ParseError::Kind::kUndefinedVariable, 2);
  expect_error(
      "def train(w, g, m, v, lr):\n"
      "  update = sqrt(g)\n"
      "  return update, m\n",
      ParseError::Kind::kSyntax, 3);
  // update must be defined before the return.
  expect_error(
      "def train(w, g, m, v, lr):\n"
      "  x = sqrt(g)\n"
      "  return update, m, v\n",
      ParseError::Kind::kUndefinedVariable, 3);
  // Wrong arity is a syntax error at the call.
  expect_error(
      "def train(w, g, m, v, lr):\n"
      "  update = sqrt(g, m)\n"
      "  return update, m, v\n",
      ParseError::Kind::kSyntax, 2);
}

TEST_CASE("crlf and trailing blank lines are tolerated") {
  const Program p = ParseProgram(
      "def train(w, g, m, v, lr):\r\n"
      "  update = g * lr\r\n"
      "  return update, m, v\r\n\r\n");
  CHECK(p.statements.size() == 1);
}

TEST_CASE("json round trip preserves nonfinite constants") {
  Program p = ParseProgram(
      "def train(w, g, m, v, lr):\n"
      "  update = g * 0.30000000000000004\n"
      "  return update, m, v\n");
  p.statements[0].args[1] =
      Arg::Const(std::numeric_limits<double>::infinity());
  const Program q = ProgramFromJson(ProgramToJson(p));
  CHECK(q == p);

  p.statements[0].args[1] = Arg::Const(0.30000000000000004);
  const Program r = ProgramFromJson(ProgramToJson(p));
  CHECK(r == p);
}

TEST_CASE("format_constant is the shortest round-tripping decimal") {
  CHECK(FormatConstant(0.1) == "0.1");
  CHECK(FormatConstant(1.0) == "1");
  CHECK(FormatConstant(0.30000000000000004) == "0.30000000000000004");
  CHECK(std::stod(FormatConstant(0.8999999761581421)) == 0.8999999761581421);
}

TEST_CASE("execute runs reassignments flow-sensitively") {
  const Program p = ParseProgram(
      "def train(w, g, m, v, lr):\n"
      "  m = g * 2.0\n"
      "  update = m * 1.0\n"
      "  m = m * 10.0\n"
      "  return update, m, v\n");
  const ExecutionResult r =
      Execute(p, TensorValue::Scalar(0), TensorValue::Scalar(3),
              TensorValue::Scalar(7), TensorValue::Scalar(0),
              TensorValue::Scalar(1));
  CHECK(r.update.scalar() == 6.0);
  CHECK(r.m.scalar() == 60.0);
  CHECK(r.v.scalar() == 0.0);
}

TEST_CASE("estimate_space matches hand-computed products") {
  // 2^2 * 3^(2*2) = 4 * 81 = 324
  CHECK(EstimateSpace(2, 3, 2, 2) == "324");
  // 10^3 * 10^(2*3) = 10^9
  CHECK(EstimateSpace(10, 10, 2, 3) == "1000000000");
  CHECK(EstimateSpace(1, 1, 1, 5) == "1");
  // Big-number path: the paper-scale count has hundreds of digits; check the
  // digit count of 43^21 * 9^(42): 21*log10(43) + 42*log10(9) = 74.4 -> 75.
  CHECK(EstimateSpace(43, 9, 2, 21).size() == 75);
}

TEST_SUITE_END();

}  // namespace
}  // namespace optimforge
