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

#include "optimforge/functions.hpp"

#include <array>
#include <cmath>
#include <numbers>

namespace optimforge {

namespace {

double Sign(double x) {
  if (std::isnan(x)) return x;
  if (x > 0.0) return 1.0;
  if (x < 0.0) return -1.0;
  return 0.0;
}

double Exp10(double x) { return std::pow(10.0, x); }
double Square(double x) { return x * x; }
double Cube(double x) { return x * x * x; }
double Reciprocal(double x) { return 1.0 / x; }

double Add(double a, double b) { return a + b; }
double Sub(double a, double b) { return a - b; }
double Mul(double a, double b) { return a * b; }
double Div(double a, double b) { return a / b; }
double Power(double a, double b) { return std::pow(a, b); }

// NaN in either operand propagates; fmax/fmin would drop it.
double Maximum(double a, double b) {
  if (std::isnan(a)) return a;
  if (std::isnan(b)) return b;
  return a > b ? a : b;
}
double Minimum(double a, double b) {
  if (std::isnan(a)) return a;
  if (std::isnan(b)) return b;
  return a < b ? a : b;
}

constexpr std::array<FunctionSpec, 43> kRegistry = {{
    // 27 elementwise unary math functions.
    {"abs", 1, false, OpCategory::kElementwiseUnary, [](double x) { return std::fabs(x); }},
    {"cos", 1, false, OpCategory::kElementwiseUnary, [](double x) { return std::cos(x); }},
    {"sin", 1, false, OpCategory::kElementwiseUnary, [](double x) { return std::sin(x); }},
    {"tan", 1, false, OpCategory::kElementwiseUnary, [](double x) { return std::tan(x); }},
    {"arcsin", 1, false, OpCategory::kElementwiseUnary, [](double x) { return std::asin(x); }},
    {"arccos", 1, false, OpCategory::kElementwiseUnary, [](double x) { return std::acos(x); }},
    {"arctan", 1, false, OpCategory::kElementwiseUnary, [](double x) { return std::atan(x); }},
    {"exp", 1, false, OpCategory::kElementwiseUnary, [](double x) { return std::exp(x); }},
    {"log", 1, false, OpCategory::kElementwiseUnary, [](double x) { return std::log(x); }},
    {"sinh", 1, false, OpCategory::kElementwiseUnary, [](double x) { return std::sinh(x); }},
    {"cosh", 1, false, OpCategory::kElementwiseUnary, [](double x) { return std::cosh(x); }},
    {"tanh", 1, false, OpCategory::kElementwiseUnary, [](double x) { return std::tanh(x); }},
    {"arcsinh", 1, false, OpCategory::kElementwiseUnary, [](double x) { return std::asinh(x); }},
    {"arccosh", 1, false, OpCategory::kElementwiseUnary, [](double x) { return std::acosh(x); }},
    {"arctanh", 1, false, OpCategory::kElementwiseUnary, [](double x) { return std::atanh(x); }},
    {"sign", 1, false, OpCategory::kElementwiseUnary, Sign},
    {"exp2", 1, false, OpCategory::kElementwiseUnary, [](double x) { return std::exp2(x); }},
    {"exp10", 1, false, OpCategory::kElementwiseUnary, Exp10},
    {"expm1", 1, false, OpCategory::kElementwiseUnary, [](double x) { return std::expm1(x); }},
    {"log10", 1, false, OpCategory::kElementwiseUnary, [](double x) { return std::log10(x); }},
    {"log2", 1, false, OpCategory::kElementwiseUnary, [](double x) { return std::log2(x); }},
    {"log1p", 1, false, OpCategory::kElementwiseUnary, [](double x) { return std::log1p(x); }},
    {"square", 1, false, OpCategory::kElementwiseUnary, Square},
    {"sqrt", 1, false, OpCategory::kElementwiseUnary, [](double x) { return std::sqrt(x); }},
    {"cube", 1, false, OpCategory::kElementwiseUnary, Cube},
    {"cbrt", 1, false, OpCategory::kElementwiseUnary, [](double x) { return std::cbrt(x); }},
    {"reciprocal", 1, false, OpCategory::kElementwiseUnary, Reciprocal},
    // Reductions.
    {"norm", 1, false, OpCategory::kNorm},
    {"global_norm", 1, false, OpCategory::kGlobalNorm},
    // Binary functions.
    {"+", 2, true, OpCategory::kElementwiseBinary, nullptr, Add},
    {"-", 2, false, OpCategory::kElementwiseBinary, nullptr, Sub},
    {"*", 2, true, OpCategory::kElementwiseBinary, nullptr, Mul},
    {"/", 2, false, OpCategory::kElementwiseBinary, nullptr, Div},
    {"power", 2, false, OpCategory::kElementwiseBinary, nullptr, Power},
    {"maximum", 2, true, OpCategory::kElementwiseBinary, nullptr, Maximum},
    {"minimum", 2, true, OpCategory::kElementwiseBinary, nullptr, Minimum},
    {"dot", 2, true, OpCategory::kDot},
    {"cosine_sim", 2, true, OpCategory::kCosineSim},
    {"clip_by_global_norm", 2, false, OpCategory::kClipByGlobalNorm},
    // Ternary.
    {"interpolate", 3, false, OpCategory::kInterpolate},
    // Nullary constants.
    {"get_pi", 0, false, OpCategory::kConstant, nullptr, nullptr, std::numbers::pi},
    {"get_e", 0, false, OpCategory::kConstant, nullptr, nullptr, std::numbers::e},
    {"get_eps", 0, false, OpCategory::kConstant, nullptr, nullptr, kEpsConstant},
}};

std::string_view CanonicalName(std::string_view name) {
  if (name == "interp") return "interpolate";
  if (name == "clip") return "clip_by_global_norm";
  if (name == "min") return "minimum";
  if (name == "max") return "maximum";
  return name;
}

TensorValue NormOf(const TensorValue& v) {
  switch (v.kind()) {
    case TensorValue::Kind::kScalar:
      return TensorValue::Scalar(std::fabs(v.scalar()));
    case TensorValue::Kind::kArray: {
      double acc = 0.0;
      for (double x : v.data()) acc += x * x;
      return TensorValue::Scalar(std::sqrt(acc));
    }
    case TensorValue::Kind::kTree: {
      std::vector<std::pair<std::string, TensorValue>> kids;
      kids.reserve(v.children().size());
      for (const auto& [key, child] : v.children())
        kids.emplace_back(key, NormOf(child));
      return TensorValue::Tree(std::move(kids));
    }
  }
  throw ValueError("corrupt TensorValue kind");
}

double SumOf(const TensorValue& v) {
  double acc = 0.0;
  ForEachLeafValue(v, [&](double x) { acc += x; });
  return acc;
}

}  // namespace

std::span<const FunctionSpec> FunctionRegistry() { return kRegistry; }

const FunctionSpec* FindFunction(std::string_view name) {
  const std::string_view canonical = CanonicalName(name);
  for (const FunctionSpec& fn : kRegistry)
    if (fn.name == canonical) return &fn;
  return nullptr;
}

int FunctionIndex(std::string_view name) {
  const std::string_view canonical = CanonicalName(name);
  for (std::size_t i = 0; i < kRegistry.size(); ++i)
    if (kRegistry[i].name == canonical) return static_cast<int>(i);
  return -1;
}

double GlobalNorm(const TensorValue& v) {
  double acc = 0.0;
  ForEachLeafValue(v, [&](double x) { acc += x * x; });
  return std::sqrt(acc);
}

double DotProduct(const TensorValue& a, const TensorValue& b) {
  using Kind = TensorValue::Kind;
  if (a.kind() == Kind::kScalar && b.kind() == Kind::kScalar)
    return a.scalar() * b.scalar();
  // A scalar operand broadcasts against the other side.
  if (a.kind() == Kind::kScalar) return a.scalar() * SumOf(b);
  if (b.kind() == Kind::kScalar) return SumOf(a) * b.scalar();
  if (a.kind() == Kind::kArray && b.kind() == Kind::kArray) {
    if (a.shape() != b.shape()) throw ShapeMismatch("dot of unequal shapes");
    double acc = 0.0;
    for (std::size_t i = 0; i < a.data().size(); ++i)
      acc += a.data()[i] * b.data()[i];
    return acc;
  }
  if (a.kind() == Kind::kTree && b.kind() == Kind::kTree) {
    if (a.children().size() != b.children().size())
      throw SchemaMismatch("dot of trees with different keys");
    double acc = 0.0;
    for (std::size_t i = 0; i < a.children().size(); ++i) {
      if (a.children()[i].first != b.children()[i].first)
        throw SchemaMismatch("dot of trees with different keys");
      acc += DotProduct(a.children()[i].second, b.children()[i].second);
    }
    return acc;
  }
  throw SchemaMismatch("dot of array and tree");
}

TensorValue ApplyFunction(const FunctionSpec& fn,
                          std::span<const TensorValue> args) {
  if (static_cast<int>(args.size()) != fn.arity)
    throw ArityError(std::string(fn.name) + ": expected " +
                     std::to_string(fn.arity) + " arguments, got " +
                     std::to_string(args.size()));
  switch (fn.category) {
    case OpCategory::kElementwiseUnary:
      return UnaryMap(args[0], fn.unary);
    case OpCategory::kNorm:
      return NormOf(args[0]);
    case OpCategory::kGlobalNorm:
      return TensorValue::Scalar(GlobalNorm(args[0]));
    case OpCategory::kElementwiseBinary:
      return BinaryMap(args[0], args[1], fn.binary);
    case OpCategory::kDot:
      return TensorValue::Scalar(DotProduct(args[0], args[1]));
    case OpCategory::kCosineSim: {
      const double num = DotProduct(args[0], args[1]);
      const double den = std::sqrt(DotProduct(args[0], args[0]) *
                                   DotProduct(args[1], args[1]));
      // Zero vectors give 0/0 = NaN, which propagates to the fitness.
      return TensorValue::Scalar(num / den);
    }
    case OpCategory::kClipByGlobalNorm: {
      if (!args[1].is_scalar())
        throw ShapeMismatch("clip_by_global_norm threshold must be a scalar");
      const double ratio = args[1].scalar() / GlobalNorm(args[0]);
      // min(1, c / norm); when the ratio is >= 1 (or NaN from 0/0) the input
      // passes through bitwise-unchanged.
      if (!(ratio < 1.0)) return args[0];
      return UnaryMap(args[0], [&](double x) { return x * ratio; });
    }
    case OpCategory::kInterpolate: {
      if (!args[2].is_scalar())
        throw ShapeMismatch("interpolate factor must be a scalar");
      const double a = args[2].scalar();
      return BinaryMap(args[0], args[1],
                       [&](double x, double y) { return (1.0 - a) * x + a * y; });
    }
    case OpCategory::kConstant:
      return TensorValue::Scalar(fn.constant);
  }
  throw ValueError("corrupt function category");
}

}  // namespace optimforge
