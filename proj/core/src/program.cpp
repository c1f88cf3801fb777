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

#include "optimforge/program.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <sstream>

#include "json.hpp"

#include "optimforge/functions.hpp"

namespace optimforge {

namespace {

const std::array<std::string_view, 5> kInputs = {"w", "g", "m", "v", "lr"};
const std::array<std::string_view, 3> kReturns = {"update", "m", "v"};

bool IsIdentStart(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool IsIdentChar(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

// Single-line scanner with 1-based column reporting.
struct Scanner {
  std::string_view text;
  int line;
  std::size_t pos = 0;

  [[noreturn]] void Fail(const std::string& msg) const {
    throw ParseError(ParseError::Kind::kSyntax, line,
                     static_cast<int>(pos) + 1, msg);
  }

  void SkipSpace() {
    while (pos < text.size() && (text[pos] == ' ' || text[pos] == '\t')) ++pos;
  }

  bool AtEnd() {
    SkipSpace();
    return pos >= text.size();
  }

  char Peek() {
    SkipSpace();
    return pos < text.size() ? text[pos] : '\0';
  }

  void Expect(char c) {
    SkipSpace();
    if (pos >= text.size() || text[pos] != c)
      Fail(std::string("expected '") + c + "'");
    ++pos;
  }

  bool Consume(char c) {
    SkipSpace();
    if (pos < text.size() && text[pos] == c) {
      ++pos;
      return true;
    }
    return false;
  }

  std::string Identifier() {
    SkipSpace();
    if (pos >= text.size() || !IsIdentStart(text[pos])) Fail("expected identifier");
    std::size_t start = pos;
    while (pos < text.size() && IsIdentChar(text[pos])) ++pos;
    return std::string(text.substr(start, pos - start));
  }

  void ExpectKeyword(std::string_view kw) {
    SkipSpace();
    std::size_t start = pos;
    std::string id = Identifier();
    if (id != kw) {
      pos = start;
      Fail("expected '" + std::string(kw) + "'");
    }
  }

  double Number() {
    SkipSpace();
    const char* begin = text.data() + pos;
    const char* end = text.data() + text.size();
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc() || ptr == begin) Fail("expected number");
    pos += static_cast<std::size_t>(ptr - begin);
    return value;
  }

  bool LooksLikeNumber() {
    SkipSpace();
    if (pos >= text.size()) return false;
    char c = text[pos];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return true;
    if (c == '-' || c == '+') {
      if (pos + 1 < text.size()) {
        char d = text[pos + 1];
        return std::isdigit(static_cast<unsigned char>(d)) || d == '.' ||
               d == 'i' || d == 'n';
      }
      return false;
    }
    // from_chars handles inf / nan.
    return (c == 'i' && text.substr(pos, 3) == "inf") ||
           (c == 'n' && text.substr(pos, 3) == "nan");
  }
};

// Base-1e9 little-endian unsigned big integer; just enough for the search
// space estimate.
class BigUint {
 public:
  explicit BigUint(std::uint64_t v) {
    while (v > 0) {
      limbs_.push_back(static_cast<std::uint32_t>(v % kBase));
      v /= kBase;
    }
    if (limbs_.empty()) limbs_.push_back(0);
  }

  void MulSmall(std::uint64_t factor) {
    std::uint64_t carry = 0;
    for (std::uint32_t& limb : limbs_) {
      const std::uint64_t cur = static_cast<std::uint64_t>(limb) * factor + carry;
      limb = static_cast<std::uint32_t>(cur % kBase);
      carry = cur / kBase;
    }
    while (carry > 0) {
      limbs_.push_back(static_cast<std::uint32_t>(carry % kBase));
      carry /= kBase;
    }
  }

  std::string ToString() const {
    std::string out = std::to_string(limbs_.back());
    char buf[16];
    for (auto it = limbs_.rbegin() + 1; it != limbs_.rend(); ++it) {
      std::snprintf(buf, sizeof(buf), "%09u", *it);
      out += buf;
    }
    return out;
  }

 private:
  static constexpr std::uint64_t kBase = 1000000000ULL;
  std::vector<std::uint32_t> limbs_;
};

}  // namespace

const std::array<std::string_view, 5>& Program::Inputs() { return kInputs; }
const std::array<std::string_view, 3>& Program::Returns() { return kReturns; }

bool Program::IsInput(std::string_view name) {
  return std::find(kInputs.begin(), kInputs.end(), name) != kInputs.end();
}

std::string FormatConstant(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

Program ParseProgram(std::string_view text) {
  std::vector<std::string_view> lines;
  {
    std::size_t start = 0;
    while (start <= text.size()) {
      std::size_t nl = text.find('\n', start);
      if (nl == std::string_view::npos) {
        lines.push_back(text.substr(start));
        break;
      }
      lines.push_back(text.substr(start, nl - start));
      start = nl + 1;
    }
  }

  // Strip trailing blank lines; reject blank lines in the body.
  while (!lines.empty() && lines.back().find_first_not_of(" \t\r") ==
                               std::string_view::npos)
    lines.pop_back();
  if (lines.size() < 2)
    throw ParseError(ParseError::Kind::kSyntax, 1, 1, "program too short");

  for (auto& lv : lines)
    if (!lv.empty() && lv.back() == '\r') lv.remove_suffix(1);

  // Header.
  {
    Scanner s{lines[0], 1};
    s.ExpectKeyword("def");
    s.ExpectKeyword("train");
    s.Expect('(');
    for (std::size_t i = 0; i < kInputs.size(); ++i) {
      if (i > 0) s.Expect(',');
      std::string name = s.Identifier();
      if (name != kInputs[i])
        s.Fail("input " + std::to_string(i + 1) + " must be named '" +
               std::string(kInputs[i]) + "'");
    }
    s.Expect(')');
    s.Expect(':');
    if (!s.AtEnd()) s.Fail("trailing characters after header");
  }

  Program p;
  std::vector<std::string> defined(kInputs.begin(), kInputs.end());
  auto is_defined = [&](const std::string& name) {
    return std::find(defined.begin(), defined.end(), name) != defined.end();
  };

  auto parse_term = [&](Scanner& s) -> Arg {
    if (s.LooksLikeNumber()) return Arg::Const(s.Number());
    const int col = static_cast<int>(s.pos) + 1;
    std::string name = s.Identifier();
    if (!is_defined(name))
      throw ParseError(ParseError::Kind::kUndefinedVariable, s.line, col,
                       "undefined variable '" + name + "'");
    return Arg::Var(std::move(name));
  };

  bool saw_return = false;
  for (std::size_t li = 1; li < lines.size(); ++li) {
    Scanner s{lines[li], static_cast<int>(li) + 1};
    if (s.AtEnd())
      s.Fail("blank line inside program body");

    std::size_t kw_pos = s.pos;
    std::string first = s.Identifier();
    if (first == "return") {
      for (std::size_t i = 0; i < kReturns.size(); ++i) {
        if (i > 0) s.Expect(',');
        const int col = static_cast<int>(s.pos) + 1;
        std::string name = s.Identifier();
        if (name != kReturns[i]) s.Fail("returns must be 'update, m, v'");
        if (!is_defined(name))
          throw ParseError(ParseError::Kind::kUndefinedVariable, s.line, col,
                           "return of undefined variable '" + name + "'");
      }
      if (!s.AtEnd()) s.Fail("trailing characters after return");
      if (li + 1 != lines.size()) s.Fail("statements after return");
      saw_return = true;
      break;
    }

    Statement stmt;
    stmt.out = std::move(first);
    s.Expect('=');

    if (s.LooksLikeNumber()) {
      // Infix with a constant left operand, e.g. "x = 0.5 * g".
      Arg lhs = Arg::Const(s.Number());
      char op = s.Peek();
      if (op != '+' && op != '-' && op != '*' && op != '/')
        s.Fail("expected operator");
      ++s.pos;
      Arg rhs = parse_term(s);
      stmt.fn = std::string(1, op);
      stmt.args = {std::move(lhs), std::move(rhs)};
    } else {
      const int name_col = static_cast<int>(s.pos) + 1;
      std::string name = s.Identifier();
      if (s.Consume('(')) {
        const FunctionSpec* fn = FindFunction(name);
        if (fn == nullptr)
          throw ParseError(ParseError::Kind::kUnknownFunction, s.line, name_col,
                           "unknown function '" + name + "'");
        stmt.fn = std::string(fn->name);
        if (!s.Consume(')')) {
          do {
            stmt.args.push_back(parse_term(s));
          } while (s.Consume(','));
          s.Expect(')');
        }
        if (static_cast<int>(stmt.args.size()) != fn->arity)
          s.Fail("function '" + stmt.fn + "' expects " +
                 std::to_string(fn->arity) + " arguments");
      } else {
        // Infix with a variable left operand.
        if (!is_defined(name))
          throw ParseError(ParseError::Kind::kUndefinedVariable, s.line,
                           name_col, "undefined variable '" + name + "'");
        char op = s.Peek();
        if (op != '+' && op != '-' && op != '*' && op != '/')
          s.Fail("expected operator or '('");
        ++s.pos;
        Arg rhs = parse_term(s);
        stmt.fn = std::string(1, op);
        stmt.args = {Arg::Var(std::move(name)), std::move(rhs)};
      }
    }
    if (!s.AtEnd()) s.Fail("trailing characters after statement");
    (void)kw_pos;
    if (!is_defined(stmt.out)) defined.push_back(stmt.out);
    p.statements.push_back(std::move(stmt));
  }

  if (!saw_return)
    throw ParseError(ParseError::Kind::kSyntax,
                     static_cast<int>(lines.size()), 1,
                     "missing 'return update, m, v'");
  return p;
}

namespace {

std::string ArgToText(const Arg& a) {
  return a.is_var() ? a.var : FormatConstant(a.value);
}

}  // namespace

std::string PrintProgram(const Program& p) {
  std::string out = "def train(w, g, m, v, lr):\n";
  for (const Statement& stmt : p.statements) {
    out += "  " + stmt.out + " = ";
    if (stmt.fn.size() == 1 && stmt.args.size() == 2 &&
        (stmt.fn == "+" || stmt.fn == "-" || stmt.fn == "*" || stmt.fn == "/")) {
      out += ArgToText(stmt.args[0]) + " " + stmt.fn + " " +
             ArgToText(stmt.args[1]);
    } else {
      out += stmt.fn + "(";
      for (std::size_t i = 0; i < stmt.args.size(); ++i) {
        if (i > 0) out += ", ";
        out += ArgToText(stmt.args[i]);
      }
      out += ")";
    }
    out += "\n";
  }
  out += "  return update, m, v\n";
  return out;
}

std::string ProgramToJson(const Program& p) {
  nlohmann::json doc;
  doc["statements"] = nlohmann::json::array();
  for (const Statement& stmt : p.statements) {
    nlohmann::json js;
    js["out"] = stmt.out;
    js["fn"] = stmt.fn;
    js["args"] = nlohmann::json::array();
    for (const Arg& a : stmt.args) {
      if (a.is_var()) {
        js["args"].push_back({{"var", a.var}});
      } else if (std::isfinite(a.value)) {
        js["args"].push_back({{"const", a.value}});
      } else {
        // JSON has no Inf/NaN literals; keep them as strings.
        js["args"].push_back({{"const", FormatConstant(a.value)}});
      }
    }
    doc["statements"].push_back(std::move(js));
  }
  return doc.dump(2);
}

Program ProgramFromJson(std::string_view json_text) {
  const nlohmann::json doc = nlohmann::json::parse(json_text);
  Program p;
  for (const auto& js : doc.at("statements")) {
    Statement stmt;
    stmt.out = js.at("out").get<std::string>();
    const FunctionSpec* fn = FindFunction(js.at("fn").get<std::string>());
    if (fn == nullptr)
      throw ParseError(ParseError::Kind::kUnknownFunction, 0, 0,
                       "unknown function '" + js.at("fn").get<std::string>() + "'");
    stmt.fn = std::string(fn->name);
    for (const auto& ja : js.at("args")) {
      if (ja.contains("var")) {
        stmt.args.push_back(Arg::Var(ja.at("var").get<std::string>()));
      } else {
        const auto& jc = ja.at("const");
        if (jc.is_string()) {
          const std::string s = jc.get<std::string>();
          double v = 0.0;
          std::from_chars(s.data(), s.data() + s.size(), v);
          stmt.args.push_back(Arg::Const(v));
        } else {
          stmt.args.push_back(Arg::Const(jc.get<double>()));
        }
      }
    }
    p.statements.push_back(std::move(stmt));
  }
  return p;
}

ExecutionResult Execute(const Program& p, const TensorValue& w,
                        const TensorValue& g, const TensorValue& m,
                        const TensorValue& v, const TensorValue& lr) {
  std::vector<std::pair<std::string, TensorValue>> env;
  env.reserve(p.statements.size() + 5);
  env.emplace_back("w", w);
  env.emplace_back("g", g);
  env.emplace_back("m", m);
  env.emplace_back("v", v);
  env.emplace_back("lr", lr);

  auto lookup = [&](const std::string& name) -> const TensorValue& {
    for (auto it = env.rbegin(); it != env.rend(); ++it)
      if (it->first == name) return it->second;
    throw ValueError("undefined variable '" + name + "'");
  };

  std::vector<TensorValue> args;
  for (const Statement& stmt : p.statements) {
    const FunctionSpec* fn = FindFunction(stmt.fn);
    if (fn == nullptr) throw ValueError("unknown function '" + stmt.fn + "'");
    args.clear();
    for (const Arg& a : stmt.args)
      args.push_back(a.is_var() ? lookup(a.var) : TensorValue::Scalar(a.value));
    TensorValue result = ApplyFunction(*fn, args);
    bool replaced = false;
    for (auto& [name, value] : env) {
      if (name == stmt.out) {
        value = std::move(result);
        replaced = true;
        break;
      }
    }
    if (!replaced) env.emplace_back(stmt.out, std::move(result));
  }

  return ExecutionResult{lookup("update"), lookup("m"), lookup("v")};
}

std::string EstimateSpace(std::uint64_t n_f, std::uint64_t n_v,
                          std::uint64_t n_a, std::uint64_t l) {
  BigUint acc(1);
  for (std::uint64_t i = 0; i < l; ++i) acc.MulSmall(n_f);
  for (std::uint64_t i = 0; i < n_a * l; ++i) acc.MulSmall(n_v);
  return acc.ToString();
}

}  // namespace optimforge
