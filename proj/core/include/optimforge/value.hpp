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

#ifndef OPTIMFORGE_VALUE_HPP_
#define OPTIMFORGE_VALUE_HPP_

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstring>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace optimforge {

class ValueError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Arrays of unequal shape combined elementwise.
class ShapeMismatch : public ValueError {
 public:
  using ValueError::ValueError;
};

// Trees with different key sequences combined elementwise.
class SchemaMismatch : public ValueError {
 public:
  using ValueError::ValueError;
};

class ArityError : public ValueError {
 public:
  using ValueError::ValueError;
};

// Runtime value of the DSL: a 64-bit float scalar, a dense row-major array,
// or an ordered tree of named values whose leaves are scalars/arrays.
// Immutable by convention once built; NaN/Inf propagate and are never
// replaced.
class TensorValue {
 public:
  enum class Kind { kScalar, kArray, kTree };

  TensorValue() = default;

  static TensorValue Scalar(double v) {
    TensorValue t;
    t.kind_ = Kind::kScalar;
    t.scalar_ = v;
    return t;
  }

  static TensorValue Array(std::vector<std::size_t> shape,
                           std::vector<double> data) {
    std::size_t n = 1;
    for (std::size_t d : shape) n *= d;
    if (n != data.size())
      throw ValueError("array payload length does not match shape");
    TensorValue t;
    t.kind_ = Kind::kArray;
    t.shape_ = std::move(shape);
    t.data_ = std::move(data);
    return t;
  }

  static TensorValue Vector(std::vector<double> data) {
    std::vector<std::size_t> shape{data.size()};
    return Array(std::move(shape), std::move(data));
  }

  static TensorValue Tree(std::vector<std::pair<std::string, TensorValue>> kids) {
    TensorValue t;
    t.kind_ = Kind::kTree;
    t.children_ = std::move(kids);
    return t;
  }

  static TensorValue ZerosLike(const TensorValue& v);

  Kind kind() const { return kind_; }
  bool is_scalar() const { return kind_ == Kind::kScalar; }
  bool is_array() const { return kind_ == Kind::kArray; }
  bool is_tree() const { return kind_ == Kind::kTree; }

  double scalar() const { return scalar_; }
  const std::vector<std::size_t>& shape() const { return shape_; }
  const std::vector<double>& data() const { return data_; }
  std::vector<double>& mutable_data() { return data_; }
  const std::vector<std::pair<std::string, TensorValue>>& children() const {
    return children_;
  }
  std::vector<std::pair<std::string, TensorValue>>& mutable_children() {
    return children_;
  }

  const TensorValue* Find(const std::string& name) const {
    for (const auto& [key, child] : children_)
      if (key == name) return &child;
    return nullptr;
  }

  // Number of scalar entries in the flattened value.
  std::size_t NumElements() const;

  bool AllFinite() const;

  // Exact structural equality: same kinds, shapes, schemas and bit patterns
  // (distinguishes -0.0 from 0.0; NaN payloads compare by bits).
  bool BitwiseEqual(const TensorValue& other) const;

  // Shape/schema equality, ignoring payloads.
  bool SameStructure(const TensorValue& other) const;

 private:
  Kind kind_ = Kind::kScalar;
  double scalar_ = 0.0;
  std::vector<std::size_t> shape_;
  std::vector<double> data_;
  std::vector<std::pair<std::string, TensorValue>> children_;
};

inline bool BitsEqual(double a, double b) {
  std::uint64_t x, y;
  std::memcpy(&x, &a, 8);
  std::memcpy(&y, &b, 8);
  return x == y;
}

// Applies f to every scalar entry, preserving structure.
template <class F>
TensorValue UnaryMap(const TensorValue& v, F f) {
  switch (v.kind()) {
    case TensorValue::Kind::kScalar:
      return TensorValue::Scalar(f(v.scalar()));
    case TensorValue::Kind::kArray: {
      std::vector<double> out(v.data().size());
      for (std::size_t i = 0; i < out.size(); ++i) out[i] = f(v.data()[i]);
      return TensorValue::Array(v.shape(), std::move(out));
    }
    case TensorValue::Kind::kTree: {
      std::vector<std::pair<std::string, TensorValue>> kids;
      kids.reserve(v.children().size());
      for (const auto& [key, child] : v.children())
        kids.emplace_back(key, UnaryMap(child, f));
      return TensorValue::Tree(std::move(kids));
    }
  }
  throw ValueError("corrupt TensorValue kind");
}

// Combines two values elementwise under the casting rule: a scalar broadcasts
// to anything; arrays require identical shapes; trees require identical key
// sequences; array-vs-tree is a SchemaMismatch.
template <class F>
TensorValue BinaryMap(const TensorValue& a, const TensorValue& b, F f) {
  using Kind = TensorValue::Kind;
  if (a.kind() == Kind::kScalar && b.kind() == Kind::kScalar)
    return TensorValue::Scalar(f(a.scalar(), b.scalar()));
  if (a.kind() == Kind::kScalar) {
    const double s = a.scalar();
    return UnaryMap(b, [&](double x) { return f(s, x); });
  }
  if (b.kind() == Kind::kScalar) {
    const double s = b.scalar();
    return UnaryMap(a, [&](double x) { return f(x, s); });
  }
  if (a.kind() == Kind::kArray && b.kind() == Kind::kArray) {
    if (a.shape() != b.shape())
      throw ShapeMismatch("arrays of unequal shape");
    std::vector<double> out(a.data().size());
    for (std::size_t i = 0; i < out.size(); ++i)
      out[i] = f(a.data()[i], b.data()[i]);
    return TensorValue::Array(a.shape(), std::move(out));
  }
  if (a.kind() == Kind::kTree && b.kind() == Kind::kTree) {
    if (a.children().size() != b.children().size())
      throw SchemaMismatch("trees with different keys");
    std::vector<std::pair<std::string, TensorValue>> kids;
    kids.reserve(a.children().size());
    for (std::size_t i = 0; i < a.children().size(); ++i) {
      if (a.children()[i].first != b.children()[i].first)
        throw SchemaMismatch("trees with different keys");
      kids.emplace_back(a.children()[i].first,
                        BinaryMap(a.children()[i].second,
                                  b.children()[i].second, f));
    }
    return TensorValue::Tree(std::move(kids));
  }
  throw SchemaMismatch("cannot combine array and tree");
}

// Visits every scalar entry in flattening order: tree insertion order,
// arrays row-major. This order is fixed so reductions are bit-reproducible.
template <class F>
void ForEachLeafValue(const TensorValue& v, F f) {
  switch (v.kind()) {
    case TensorValue::Kind::kScalar:
      f(v.scalar());
      return;
    case TensorValue::Kind::kArray:
      for (double x : v.data()) f(x);
      return;
    case TensorValue::Kind::kTree:
      for (const auto& [key, child] : v.children()) ForEachLeafValue(child, f);
      return;
  }
}

}  // namespace optimforge

#endif  // OPTIMFORGE_VALUE_HPP_
