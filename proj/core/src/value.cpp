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

#include "optimforge/value.hpp"

namespace optimforge {

TensorValue TensorValue::ZerosLike(const TensorValue& v) {
  switch (v.kind()) {
    case Kind::kScalar:
      return Scalar(0.0);
    case Kind::kArray:
      return Array(v.shape(), std::vector<double>(v.data().size(), 0.0));
    case Kind::kTree: {
      std::vector<std::pair<std::string, TensorValue>> kids;
      kids.reserve(v.children().size());
      for (const auto& [key, child] : v.children())
        kids.emplace_back(key, ZerosLike(child));
      return Tree(std::move(kids));
    }
  }
  throw ValueError("corrupt TensorValue kind");
}

std::size_t TensorValue::NumElements() const {
  switch (kind_) {
    case Kind::kScalar:
      return 1;
    case Kind::kArray:
      return data_.size();
    case Kind::kTree: {
      std::size_t n = 0;
      for (const auto& [key, child] : children_) n += child.NumElements();
      return n;
    }
  }
  return 0;
}

bool TensorValue::AllFinite() const {
  bool ok = true;
  ForEachLeafValue(*this, [&](double x) { ok = ok && std::isfinite(x); });
  return ok;
}

bool TensorValue::BitwiseEqual(const TensorValue& other) const {
  if (kind_ != other.kind_) return false;
  switch (kind_) {
    case Kind::kScalar:
      return BitsEqual(scalar_, other.scalar_);
    case Kind::kArray: {
      if (shape_ != other.shape_) return false;
      for (std::size_t i = 0; i < data_.size(); ++i)
        if (!BitsEqual(data_[i], other.data_[i])) return false;
      return true;
    }
    case Kind::kTree: {
      if (children_.size() != other.children_.size()) return false;
      for (std::size_t i = 0; i < children_.size(); ++i) {
        if (children_[i].first != other.children_[i].first) return false;
        if (!children_[i].second.BitwiseEqual(other.children_[i].second))
          return false;
      }
      return true;
    }
  }
  return false;
}

bool TensorValue::SameStructure(const TensorValue& other) const {
  if (kind_ != other.kind_) return false;
  switch (kind_) {
    case Kind::kScalar:
      return true;
    case Kind::kArray:
      return shape_ == other.shape_;
    case Kind::kTree: {
      if (children_.size() != other.children_.size()) return false;
      for (std::size_t i = 0; i < children_.size(); ++i) {
        if (children_[i].first != other.children_[i].first) return false;
        if (!children_[i].second.SameStructure(other.children_[i].second))
          return false;
      }
      return true;
    }
  }
  return false;
}

}  // namespace optimforge
