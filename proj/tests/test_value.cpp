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
#include <limits>
#include <vector>

#include "doctest.h"
#include "optimforge/rng.hpp"
#include "optimforge/value.hpp"

namespace optimforge {
namespace {

const double kNan = std::numeric_limits<double>::quiet_NaN();

TensorValue SampleTree() {
  return TensorValue::Tree({
      {"w1", TensorValue::Array({2, 2}, {1.0, -2.0, 3.0, 4.0})},
      {"b1", TensorValue::Vector({0.5, -0.5})},
      {"nested", TensorValue::Tree({{"s", TensorValue::Scalar(7.0)}})},
  });
}

TEST_SUITE_BEGIN("value");

TEST_CASE("constructors and accessors") {
  const TensorValue s = TensorValue::Scalar(3.5);
  CHECK(s.is_scalar());
  CHECK(s.scalar() == 3.5);

  const TensorValue a = TensorValue::Array({2, 3}, {1, 2, 3, 4, 5, 6});
  CHECK(a.is_array());
  CHECK(a.shape() == std::vector<std::size_t>{2, 3});
  CHECK(a.NumElements() == 6);

  CHECK_THROWS_AS(TensorValue::Array({2, 3}, {1, 2}), ValueError);

  const TensorValue t = SampleTree();
  CHECK(t.is_tree());
  CHECK(t.NumElements() == 7);
  REQUIRE(t.Find("b1") != nullptr);
  CHECK(t.Find("b1")->data()[1] == -0.5);
  CHECK(t.Find("missing") == nullptr);
}

TEST_CASE("zeros_like preserves structure") {
  const TensorValue z = TensorValue::ZerosLike(SampleTree());
  CHECK(z.SameStructure(SampleTree()));
  ForEachLeafValue(z, [](double x) { CHECK(x == 0.0); });
}

TEST_CASE("bitwise equality distinguishes signed zero and nan bits") {
  CHECK(TensorValue::Scalar(0.0).BitwiseEqual(TensorValue::Scalar(0.0)));
  CHECK_FALSE(TensorValue::Scalar(0.0).BitwiseEqual(TensorValue::Scalar(-0.0)));
  CHECK(TensorValue::Scalar(kNan).BitwiseEqual(TensorValue::Scalar(kNan)));
  CHECK_FALSE(SampleTree().BitwiseEqual(TensorValue::ZerosLike(SampleTree())));
  CHECK(SampleTree().BitwiseEqual(SampleTree()));
}

TEST_CASE("unary map preserves structure") {
  const TensorValue t = UnaryMap(SampleTree(), [](double x) { return -x; });
  CHECK(t.SameStructure(SampleTree()));
  CHECK(t.Find("nested")->Find("s")->scalar() == -7.0);
  CHECK(t.Find("w1")->data()[1] == 2.0);
}

TEST_CASE("binary map casting rule") {
  const auto add = [](double a, double b) { return a + b; };
  const TensorValue t = SampleTree();

  SUBCASE("scalar broadcasts to anything") {
    const TensorValue r = BinaryMap(TensorValue::Scalar(1.0), t, add);
    CHECK(r.SameStructure(t));
    CHECK(r.Find("w1")->data()[0] == 2.0);
    const TensorValue l = BinaryMap(t, TensorValue::Scalar(1.0), add);
    CHECK(l.BitwiseEqual(r));
  }

  SUBCASE("arrays require equal shapes") {
    const TensorValue a = TensorValue::Vector({1, 2});
    const TensorValue b = TensorValue::Vector({1, 2, 3});
    CHECK_THROWS_AS(BinaryMap(a, b, add), ShapeMismatch);
    CHECK(BinaryMap(a, a, add).data() == std::vector<double>{2, 4});
  }

  SUBCASE("trees require identical key sequences") {
    const TensorValue u = TensorValue::Tree({{"a", TensorValue::Scalar(1)}});
    const TensorValue v = TensorValue::Tree({{"b", TensorValue::Scalar(1)}});
    CHECK_THROWS_AS(BinaryMap(u, v, add), SchemaMismatch);
    CHECK(BinaryMap(t, t, add).SameStructure(t));
  }

  SUBCASE("array vs tree is a schema mismatch") {
    CHECK_THROWS_AS(BinaryMap(TensorValue::Vector({1.0}), t, add),
                    SchemaMismatch);
  }
}

TEST_CASE("nan and inf are values, all_finite detects them") {
  CHECK(SampleTree().AllFinite());
  TensorValue t = SampleTree();
  t.mutable_children()[0].second.mutable_data()[2] = kNan;
  CHECK_FALSE(t.AllFinite());
  const TensorValue r = UnaryMap(t, [](double x) { return x * 2; });
  CHECK(std::isnan(r.Find("w1")->data()[2]));
}

TEST_CASE("leaf iteration order is tree insertion then row-major") {
  std::vector<double> seen;
  ForEachLeafValue(SampleTree(), [&](double x) { seen.push_back(x); });
  CHECK(seen == std::vector<double>{1, -2, 3, 4, 0.5, -0.5, 7});
}

TEST_CASE("rng streams are reproducible and seed-sensitive") {
  Rng a(42), b(42), c(43);
  for (int i = 0; i < 100; ++i) CHECK(a.Next() == b.Next());
  CHECK(a.Next() != c.Next());

  Rng d(7);
  const auto snapshot = d.State();
  std::vector<double> first;
  for (int i = 0; i < 10; ++i) first.push_back(d.Normal());
  d.SetState(snapshot);
  for (int i = 0; i < 10; ++i) CHECK(d.Normal() == first[i]);
}

TEST_CASE("rng uniform and normal are sane") {
  Rng rng(11);
  double sum = 0, sumsq = 0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const double u = rng.Uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    sum += u;
  }
  CHECK(std::abs(sum / n - 0.5) < 0.01);

  sum = 0;
  for (int i = 0; i < n; ++i) {
    const double z = rng.Normal();
    sum += z;
    sumsq += z * z;
  }
  CHECK(std::abs(sum / n) < 0.02);
  CHECK(std::abs(sumsq / n - 1.0) < 0.02);
}

TEST_CASE("mix_seeds decorrelates streams") {
  CHECK(MixSeeds(1, 2) != MixSeeds(2, 1));
  CHECK(MixSeeds(0, 0) != MixSeeds(0, 1));
  CHECK(MixSeeds(5, 9) == MixSeeds(5, 9));
}

TEST_SUITE_END();

}  // namespace
}  // namespace optimforge
