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

#include "optimforge/abstract.hpp"

#include <algorithm>
#include <cstring>

#include "optimforge/functions.hpp"

namespace optimforge {

namespace {

// Structural failure inside an abstract rule; Infer converts it into a
// TypeError with the statement index attached.
struct RuleError {
  std::string reason;
};

AbstractValue Broadcast(const AbstractValue& a, const AbstractValue& b) {
  using Kind = TensorValue::Kind;
  if (a.kind == Kind::kScalar) return b;
  if (b.kind == Kind::kScalar) return a;
  if (a.kind == Kind::kArray && b.kind == Kind::kArray) {
    if (a.shape != b.shape) throw RuleError{"arrays of unequal shape"};
    return a;
  }
  if (a.kind == Kind::kTree && b.kind == Kind::kTree) {
    if (a.children.size() != b.children.size())
      throw RuleError{"trees with different keys"};
    AbstractValue out;
    out.kind = Kind::kTree;
    out.children.reserve(a.children.size());
    for (std::size_t i = 0; i < a.children.size(); ++i) {
      if (a.children[i].first != b.children[i].first)
        throw RuleError{"trees with different keys"};
      out.children.emplace_back(
          a.children[i].first,
          Broadcast(a.children[i].second, b.children[i].second));
    }
    return out;
  }
  throw RuleError{"cannot combine array and tree"};
}

// Same acceptance condition as the concrete DotProduct.
void CheckDotCompatible(const AbstractValue& a, const AbstractValue& b) {
  using Kind = TensorValue::Kind;
  if (a.kind == Kind::kScalar || b.kind == Kind::kScalar) return;
  if (a.kind == Kind::kArray && b.kind == Kind::kArray) {
    if (a.shape != b.shape) throw RuleError{"dot of unequal shapes"};
    return;
  }
  if (a.kind == Kind::kTree && b.kind == Kind::kTree) {
    if (a.children.size() != b.children.size())
      throw RuleError{"dot of trees with different keys"};
    for (std::size_t i = 0; i < a.children.size(); ++i) {
      if (a.children[i].first != b.children[i].first)
        throw RuleError{"dot of trees with different keys"};
      CheckDotCompatible(a.children[i].second, b.children[i].second);
    }
    return;
  }
  throw RuleError{"dot of array and tree"};
}

AbstractValue NormStructure(const AbstractValue& v) {
  using Kind = TensorValue::Kind;
  switch (v.kind) {
    case Kind::kScalar:
    case Kind::kArray:
      return AbstractValue::Scalar();
    case Kind::kTree: {
      AbstractValue out;
      out.kind = Kind::kTree;
      out.children.reserve(v.children.size());
      for (const auto& [key, child] : v.children)
        out.children.emplace_back(key, NormStructure(child));
      return out;
    }
  }
  throw RuleError{"corrupt abstract kind"};
}

AbstractValue ApplyAbstract(const FunctionSpec& fn,
                            const std::vector<AbstractValue>& args) {
  switch (fn.category) {
    case OpCategory::kElementwiseUnary:
      return args[0];
    case OpCategory::kNorm:
      return NormStructure(args[0]);
    case OpCategory::kGlobalNorm:
      return AbstractValue::Scalar();
    case OpCategory::kElementwiseBinary:
      return Broadcast(args[0], args[1]);
    case OpCategory::kDot:
    case OpCategory::kCosineSim:
      CheckDotCompatible(args[0], args[1]);
      return AbstractValue::Scalar();
    case OpCategory::kClipByGlobalNorm:
      if (!args[1].is_scalar())
        throw RuleError{"clip_by_global_norm threshold must be a scalar"};
      return args[0];
    case OpCategory::kInterpolate:
      if (!args[2].is_scalar())
        throw RuleError{"interpolate factor must be a scalar"};
      return Broadcast(args[0], args[1]);
    case OpCategory::kConstant:
      return AbstractValue::Scalar();
  }
  throw RuleError{"corrupt function category"};
}

template <class T>
class Env {
 public:
  const T* Find(const std::string& name) const {
    for (auto it = entries_.rbegin(); it != entries_.rend(); ++it)
      if (it->first == name) return &it->second;
    return nullptr;
  }

  void Set(const std::string& name, T value) {
    for (auto& [key, existing] : entries_) {
      if (key == name) {
        existing = std::move(value);
        return;
      }
    }
    entries_.emplace_back(name, std::move(value));
  }

 private:
  std::vector<std::pair<std::string, T>> entries_;
};

// Fixed digests for the five inputs, independent of run and platform.
HashValue InputDigest(std::size_t index) {
  return HashU64(static_cast<std::uint64_t>(index), /*tag=*/1);
}

HashValue ConstantDigest(double v) {
  std::uint64_t bits;
  std::memcpy(&bits, &v, 8);
  return HashU64(bits, /*tag=*/2);
}

HashValue FunctionDigest(std::string_view name) {
  return HashBytes(name, /*tag=*/3);
}

}  // namespace

AbstractValue AbstractValue::Array(std::vector<std::size_t> shape) {
  AbstractValue out;
  out.kind = TensorValue::Kind::kArray;
  out.shape = std::move(shape);
  return out;
}

AbstractValue AbstractValue::Of(const TensorValue& v) {
  switch (v.kind()) {
    case TensorValue::Kind::kScalar:
      return Scalar();
    case TensorValue::Kind::kArray:
      return Array(v.shape());
    case TensorValue::Kind::kTree: {
      AbstractValue out;
      out.kind = TensorValue::Kind::kTree;
      out.children.reserve(v.children().size());
      for (const auto& [key, child] : v.children())
        out.children.emplace_back(key, Of(child));
      return out;
    }
  }
  return Scalar();
}

InferredOutputs Infer(const Program& p, const InputSignature& sig) {
  Env<AbstractValue> env;
  env.Set("w", sig.w);
  env.Set("g", sig.w);
  env.Set("m", sig.w);
  env.Set("v", sig.w);
  env.Set("lr", AbstractValue::Scalar());

  std::vector<AbstractValue> args;
  for (std::size_t i = 0; i < p.statements.size(); ++i) {
    const Statement& stmt = p.statements[i];
    const FunctionSpec* fn = FindFunction(stmt.fn);
    if (fn == nullptr) throw TypeError(i, "unknown function '" + stmt.fn + "'");
    if (static_cast<int>(stmt.args.size()) != fn->arity)
      throw TypeError(i, "function '" + stmt.fn + "' expects " +
                             std::to_string(fn->arity) + " arguments");
    args.clear();
    for (const Arg& a : stmt.args) {
      if (a.is_var()) {
        const AbstractValue* found = env.Find(a.var);
        if (found == nullptr)
          throw TypeError(i, "use of undefined variable '" + a.var + "'");
        args.push_back(*found);
      } else {
        args.push_back(AbstractValue::Scalar());
      }
    }
    try {
      env.Set(stmt.out, ApplyAbstract(*fn, args));
    } catch (const RuleError& e) {
      throw TypeError(i, e.reason);
    }
  }

  const AbstractValue* update = env.Find("update");
  if (update == nullptr)
    throw TypeError(p.statements.size(), "'update' is never defined");
  if (update->kind != sig.w.kind)
    throw TypeError(p.statements.size(), "update's kind differs from w's kind");
  return InferredOutputs{*update, *env.Find("m"), *env.Find("v")};
}

bool IsValid(const Program& p, const InputSignature& sig) {
  try {
    Infer(p, sig);
    return true;
  } catch (const TypeError&) {
    return false;
  }
}

HashValue FunctionalHash(const Program& p, const InputSignature& sig,
                         bool canonicalize_commutative) {
  // The digest walk mirrors Infer; validity is a precondition so lookups
  // cannot fail here.
  (void)sig;
  Env<HashValue> env;
  env.Set("w", InputDigest(0));
  env.Set("g", InputDigest(1));
  env.Set("m", InputDigest(2));
  env.Set("v", InputDigest(3));
  env.Set("lr", InputDigest(4));

  std::vector<HashValue> digests;
  for (const Statement& stmt : p.statements) {
    const FunctionSpec* fn = FindFunction(stmt.fn);
    if (fn == nullptr) throw ValueError("unknown function '" + stmt.fn + "'");
    digests.clear();
    for (const Arg& a : stmt.args) {
      if (a.is_var()) {
        const HashValue* found = env.Find(a.var);
        if (found == nullptr)
          throw ValueError("use of undefined variable '" + a.var + "'");
        digests.push_back(*found);
      } else {
        digests.push_back(ConstantDigest(a.value));
      }
    }
    if (fn->commutative && canonicalize_commutative)
      std::sort(digests.begin(), digests.end());
    HashValue h = FunctionDigest(fn->name);
    for (const HashValue& d : digests) h = HashCombine(h, d);
    env.Set(stmt.out, h);
  }

  HashValue out = HashU64(0, /*tag=*/7);
  out = HashCombine(out, *env.Find("update"));
  out = HashCombine(out, *env.Find("m"));
  out = HashCombine(out, *env.Find("v"));
  return out;
}

std::vector<std::size_t> LiveStatements(const Program& p) {
  // Per-variable dependency sets as bitsets over statement indices.
  const std::size_t n = p.statements.size();
  const std::size_t words = (n + 63) / 64;
  using Bits = std::vector<std::uint64_t>;
  Env<Bits> env;
  const Bits empty(words, 0);
  for (std::string_view input : Program::Inputs())
    env.Set(std::string(input), empty);

  for (std::size_t i = 0; i < n; ++i) {
    const Statement& stmt = p.statements[i];
    Bits deps(words, 0);
    deps[i / 64] |= 1ULL << (i % 64);
    for (const Arg& a : stmt.args) {
      if (!a.is_var()) continue;
      const Bits* found = env.Find(a.var);
      if (found == nullptr)
        throw ValueError("use of undefined variable '" + a.var + "'");
      for (std::size_t w = 0; w < words; ++w) deps[w] |= (*found)[w];
    }
    env.Set(stmt.out, std::move(deps));
  }

  Bits live(words, 0);
  for (std::string_view ret : Program::Returns()) {
    const Bits* found = env.Find(std::string(ret));
    if (found == nullptr) continue;  // update may be undefined pre-inference
    for (std::size_t w = 0; w < words; ++w) live[w] |= (*found)[w];
  }

  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < n; ++i)
    if (live[i / 64] & (1ULL << (i % 64))) out.push_back(i);
  return out;
}

Program StripRedundant(const Program& p) {
  Program out;
  for (std::size_t i : LiveStatements(p)) out.statements.push_back(p.statements[i]);
  return out;
}

}  // namespace optimforge
