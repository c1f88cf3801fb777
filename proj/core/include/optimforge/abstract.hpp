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

#ifndef OPTIMFORGE_ABSTRACT_HPP_
#define OPTIMFORGE_ABSTRACT_HPP_

#include <cstddef>
#include <string>
#include <vector>

#include "optimforge/hash128.hpp"
#include "optimforge/program.hpp"
#include "optimforge/value.hpp"

namespace optimforge {

// Type/shape of a value with no payload: scalar, array(shape), or
// tree(schema).
struct AbstractValue {
  TensorValue::Kind kind = TensorValue::Kind::kScalar;
  std::vector<std::size_t> shape;
  std::vector<std::pair<std::string, AbstractValue>> children;

  static AbstractValue Scalar() { return AbstractValue{}; }
  static AbstractValue Array(std::vector<std::size_t> shape);
  // Structure of a concrete value.
  static AbstractValue Of(const TensorValue& v);

  bool is_scalar() const { return kind == TensorValue::Kind::kScalar; }

  friend bool operator==(const AbstractValue&, const AbstractValue&) = default;
};

// Kinds/shapes of the five inputs. m and v start with w's structure; lr is a
// scalar.
struct InputSignature {
  AbstractValue w;

  static InputSignature ScalarSig() { return InputSignature{}; }
  static InputSignature FromWeights(const TensorValue& weights) {
    return InputSignature{AbstractValue::Of(weights)};
  }
};

// Raised by Infer; index is the offending statement, or statements.size() for
// a violation at the returns.
class TypeError : public std::runtime_error {
 public:
  TypeError(std::size_t index, const std::string& reason)
      : std::runtime_error("statement " + std::to_string(index) + ": " + reason),
        index(index),
        reason(reason) {}
  std::size_t index;
  std::string reason;
};

struct InferredOutputs {
  AbstractValue update;
  AbstractValue m;
  AbstractValue v;
};

// Flow-sensitive type/shape inference. Succeeds iff every call is
// kind/shape-valid under the casting rule and update's kind equals w's kind.
InferredOutputs Infer(const Program& p, const InputSignature& sig);

// True iff Infer accepts.
bool IsValid(const Program& p, const InputSignature& sig);

// Keyed digest of the computation DAG reachable from the three returns.
// Variable names and dead statements do not affect it; arguments of
// commutative functions are sorted (unless canonicalize_commutative is off,
// which exists only to audit the raw-vs-canonical cache hit rate).
HashValue FunctionalHash(const Program& p, const InputSignature& sig,
                         bool canonicalize_commutative = true);

// Sorted indices of statements some return depends on (Appendix-J-style
// dependency propagation).
std::vector<std::size_t> LiveStatements(const Program& p);

// Restriction of p to its live statements, order preserved. Bitwise
// output-preserving and idempotent.
Program StripRedundant(const Program& p);

}  // namespace optimforge

#endif  // OPTIMFORGE_ABSTRACT_HPP_
