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

#ifndef OPTIMFORGE_PROGRAM_HPP_
#define OPTIMFORGE_PROGRAM_HPP_

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "optimforge/value.hpp"

namespace optimforge {

// An argument is either a reference to a variable or a 64-bit float constant.
struct Arg {
  enum class Kind { kVar, kConst };
  Kind kind = Kind::kConst;
  std::string var;
  double value = 0.0;

  static Arg Var(std::string name) {
    Arg a;
    a.kind = Kind::kVar;
    a.var = std::move(name);
    return a;
  }
  static Arg Const(double v) {
    Arg a;
    a.kind = Kind::kConst;
    a.value = v;
    return a;
  }
  bool is_var() const { return kind == Kind::kVar; }

  friend bool operator==(const Arg& a, const Arg& b) {
    if (a.kind != b.kind) return false;
    if (a.kind == Kind::kVar) return a.var == b.var;
    return BitsEqual(a.value, b.value);
  }
};

struct Statement {
  std::string out;
  std::string fn;
  std::vector<Arg> args;

  friend bool operator==(const Statement&, const Statement&) = default;
};

// A straight-line optimizer program: train(w, g, m, v, lr) -> update, m, v.
// Variable reassignment is permitted; every argument must name an input or a
// variable defined by an earlier statement.
struct Program {
  std::vector<Statement> statements;

  static const std::array<std::string_view, 5>& Inputs();
  static const std::array<std::string_view, 3>& Returns();
  static bool IsInput(std::string_view name);

  friend bool operator==(const Program&, const Program&) = default;
};

inline constexpr int kDefaultMaxStatements = 64;

// Parse errors carry a 1-based line and column.
class ParseError : public std::runtime_error {
 public:
  enum class Kind { kSyntax, kUnknownFunction, kUndefinedVariable };
  ParseError(Kind kind, int line, int column, const std::string& message)
      : std::runtime_error(message), kind(kind), line(line), column(column) {}
  Kind kind;
  int line;
  int column;
};

// Text grammar: header "def train(w, g, m, v, lr):", two-space-indented
// statements "name = fn(arg, ...)" (infix sugar for + - * /), footer
// "  return update, m, v". Print and Parse are mutually inverse on the
// canonical form.
Program ParseProgram(std::string_view text);
std::string PrintProgram(const Program& p);

// Structured JSON form: {"statements": [{"out", "fn", "args"}]}.
std::string ProgramToJson(const Program& p);
Program ProgramFromJson(std::string_view json_text);

// Shortest decimal text that round-trips the 64-bit float.
std::string FormatConstant(double v);

struct ExecutionResult {
  TensorValue update;
  TensorValue m;
  TensorValue v;
};

// Evaluates statements in order. The caller is expected to have validated the
// program with Infer; value errors from ill-typed programs surface as
// ValueError. NaN/Inf are values, not errors.
ExecutionResult Execute(const Program& p, const TensorValue& w,
                        const TensorValue& g, const TensorValue& m,
                        const TensorValue& v, const TensorValue& lr);

// Rough size of the search space: n_f^l * n_v^(n_a * l), exact decimal.
std::string EstimateSpace(std::uint64_t n_f, std::uint64_t n_v,
                          std::uint64_t n_a, std::uint64_t l);

}  // namespace optimforge

#endif  // OPTIMFORGE_PROGRAM_HPP_
