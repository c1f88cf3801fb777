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

#ifndef OPTIMFORGE_FUNCTIONS_HPP_
#define OPTIMFORGE_FUNCTIONS_HPP_

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "optimforge/value.hpp"

namespace optimforge {

// How a function consumes and produces values. The category drives both the
// concrete semantics and the abstract type/shape rule.
enum class OpCategory {
  kElementwiseUnary,   // maps over array elements and tree leaves
  kNorm,               // per-array L2 norm, tree structure preserved
  kGlobalNorm,         // whole input flattened to one vector -> scalar
  kElementwiseBinary,  // casting rule applies
  kDot,                // flattened dot product -> scalar
  kCosineSim,          // flattened cosine similarity -> scalar
  kClipByGlobalNorm,   // rescale first arg by min(1, c / global_norm)
  kInterpolate,        // (1 - a) * x + a * y, a scalar
  kConstant,           // nullary constant
};

struct FunctionSpec {
  std::string_view name;
  int arity;
  bool commutative;
  OpCategory category;
  double (*unary)(double) = nullptr;
  double (*binary)(double, double) = nullptr;
  double constant = 0.0;
};

// The frozen function registry (43 members). Index order is fixed; the
// checksum test pins both size and content.
std::span<const FunctionSpec> FunctionRegistry();

// Returns nullptr for unknown names. Accepts the short aliases used in
// optimizer listings: interp, clip, min, max.
const FunctionSpec* FindFunction(std::string_view name);

// Stable index of a function in the registry; -1 if unknown.
int FunctionIndex(std::string_view name);

// Evaluates fn on args. Throws ArityError / ShapeMismatch / SchemaMismatch on
// structural violations; numeric domain violations produce NaN, never throw.
TensorValue ApplyFunction(const FunctionSpec& fn,
                          std::span<const TensorValue> args);

// Flattened reductions with fixed order: tree insertion order, row-major.
double GlobalNorm(const TensorValue& v);
double DotProduct(const TensorValue& a, const TensorValue& b);

inline constexpr double kEpsConstant = 1e-8;

}  // namespace optimforge

#endif  // OPTIMFORGE_FUNCTIONS_HPP_
