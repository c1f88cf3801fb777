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

#include <string>
#include <vector>

#include "doctest.h"
#include "optimforge/abstract.hpp"
#include "optimforge/assets.hpp"
#include "optimforge/hash128.hpp"
#include "optimforge/program.hpp"
#include "optimforge/rng.hpp"

namespace optimforge {
namespace {

InputSignature TreeSig() {
  return InputSignature::FromWeights(TensorValue::Tree({
      {"w1", TensorValue::Array({3, 2}, std::vector<double>(6, 0.0))},
      {"b1", TensorValue::Vector({0.0, 0.0})},
  }));
}

TEST_SUITE_BEGIN("abstract");

TEST_CASE("infer propagates kinds flow-sensitively") {
  const InputSignature sig = TreeSig();
  const Program p = ParseProgram(
      "def train(w, g, m, v, lr):\n"
      "  n = global_norm(g)\n"
      "  update = g * n\n"
      "  m = interp(g, m, 0.9)\n"
      "  return update, m, v\n");
  const InferredOutputs out = Infer(p, sig);
  CHECK(out.update == sig.w);
  CHECK(out.m == sig.w);
  CHECK(out.v == sig.w);
}

TEST_CASE("update kind must match w kind") {
  const Program p = ParseProgram(
      "def train(w, g, m, v, lr):\n"
      "  update = global_norm(g)\n"
      "  return update, m, v\n");
  // Fine in the all-scalar signature...
  CHECK(IsValid(p, InputSignature::ScalarSig()));
  // ...but a scalar update cannot drive a tree-valued w.
  try {
    Infer(p, TreeSig());
    FAIL("expected a type error");
  } catch (const TypeError& e) {
    CHECK(e.index == p.statements.size());  // violation at the returns
  }
}

TEST_CASE("norm of a tree keeps the schema, update stays a tree") {
  const Program p = ParseProgram(
      "def train(w, g, m, v, lr):\n"
      "  update = norm(g)\n"
      "  update = update * w\n"
      "  return update, m, v\n");
  CHECK(IsValid(p, TreeSig()));
}

TEST_CASE("live statements track reassignment") {
  const Program p = ParseProgram(
      "def train(w, g, m, v, lr):\n"
      "  m = g * 2.0\n"      // dead: overwritten before any read below
      "  x = sqrt(g)\n"      // dead: never read
      "  m = g * 3.0\n"      // live: final m
      "  update = m * lr\n"  // live
      "  return update, m, v\n");
  CHECK(LiveStatements(p) == std::vector<std::size_t>{2, 3});
}

TEST_CASE("live statements keep producers read before overwrite") {
  const Program p = ParseProgram(
      "def train(w, g, m, v, lr):\n"
      "  m = g * 2.0\n"      // live: read by the next statement
      "  update = m * lr\n"  // live
      "  m = g * 3.0\n"      // live: final m
      "  return update, m, v\n");
  CHECK(LiveStatements(p) == std::vector<std::size_t>{0, 1, 2});
}

TEST_CASE("strip preserves outputs bitwise on the raw paper program") {
  const Program raw = ParseProgram(assets::RawLion());
  const Program stripped = StripRedundant(raw);
  CHECK(raw.statements.size() == 21);
  CHECK(stripped.statements.size() == 13);
  CHECK(StripRedundant(stripped) == stripped);  // idempotent

  Rng rng(99);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> data(8);
    for (double& x : data) x = rng.Normal();
    const TensorValue w = TensorValue::Vector({data[0], data[1]});
    const TensorValue g = TensorValue::Vector({data[2], data[3]});
    const TensorValue m = TensorValue::Vector({data[4], data[5]});
    const TensorValue v = TensorValue::Vector({data[6], data[7]});
    const TensorValue lr = TensorValue::Scalar(0.01 * (trial + 1));
    const ExecutionResult a = Execute(raw, w, g, m, v, lr);
    const ExecutionResult b = Execute(stripped, w, g, m, v, lr);
    CHECK(a.update.BitwiseEqual(b.update));
    CHECK(a.m.BitwiseEqual(b.m));
    CHECK(a.v.BitwiseEqual(b.v));
  }
}

TEST_CASE("appendix programs are valid and executable") {
  for (const char* name : {"reg", "adagrad", "belief", "adamw", "lion",
                           "raw", "discovered"}) {
    CAPTURE(name);
    const Program p = ParseProgram(assets::Find(name));
    CHECK(IsValid(p, InputSignature::ScalarSig()));
    CHECK(IsValid(p, TreeSig()));
    const ExecutionResult r = Execute(
        p, TensorValue::Vector({0.5, -0.5}), TensorValue::Vector({0.1, 0.2}),
        TensorValue::Vector({0.0, 0.0}), TensorValue::Vector({0.0, 0.0}),
        TensorValue::Scalar(1.0));
    CHECK(r.update.is_array());
  }
}

TEST_CASE("hash ignores variable names") {
  const Program a = ParseProgram(
      "def train(w, g, m, v, lr):\n"
      "  foo = sqrt(g)\n"
      "  update = foo * lr\n"
      "  return update, m, v\n");
  const Program b = ParseProgram(
      "def train(w, g, m, v, lr):\n"
      "  bar = sqrt(g)\n"
      "  update = bar * lr\n"
      "  return update, m, v\n");
  const InputSignature sig = InputSignature::ScalarSig();
  CHECK(FunctionalHash(a, sig) == FunctionalHash(b, sig));
}

TEST_CASE("hash ignores dead statements") {
  const Program a = ParseProgram(
      "def train(w, g, m, v, lr):\n"
      "  update = g * lr\n"
      "  return update, m, v\n");
  const Program b = ParseProgram(
      "def train(w, g, m, v, lr):\n"
      "  junk = cosh(w)\n"
      "  update = g * lr\n"
      "  junk = junk + w\n"
      "  return update, m, v\n");
  const InputSignature sig = InputSignature::ScalarSig();
  CHECK(FunctionalHash(a, sig) == FunctionalHash(b, sig));
}

TEST_CASE("hash canonicalizes commutative arguments only when asked") {
  const Program a = ParseProgram(
      "def train(w, g, m, v, lr):\n"
      "  update = g + w\n"
      "  return update, m, v\n");
  const Program b = ParseProgram(
      "def train(w, g, m, v, lr):\n"
      "  update = w + g\n"
      "  return update, m, v\n");
  const InputSignature sig = InputSignature::ScalarSig();
  CHECK(FunctionalHash(a, sig) == FunctionalHash(b, sig));
  CHECK(FunctionalHash(a, sig, false) != FunctionalHash(b, sig, false));

  // Non-commutative arguments must not be sorted.
  const Program c = ParseProgram(
      "def train(w, g, m, v, lr):\n"
      "  update = g - w\n"
      "  return update, m, v\n");
  const Program d = ParseProgram(
      "def train(w, g, m, v, lr):\n"
      "  update = w - g\n"
      "  return update, m, v\n");
  CHECK(FunctionalHash(c, sig) != FunctionalHash(d, sig));
}

TEST_CASE("hash distinguishes constants by bit pattern") {
  const Program a = ParseProgram(
      "def train(w, g, m, v, lr):\n"
      "  update = g * 0.1\n"
      "  return update, m, v\n");
  const Program b = ParseProgram(
      "def train(w, g, m, v, lr):\n"
      "  update = g * 0.2\n"
      "  return update, m, v\n");
  const InputSignature sig = InputSignature::ScalarSig();
  CHECK(FunctionalHash(a, sig) != FunctionalHash(b, sig));
}

TEST_CASE("hash depends on the signature when shapes matter") {
  // Same program text hashes identically under the same signature.
  const Program p = ParseProgram(assets::AdamW());
  CHECK(FunctionalHash(p, InputSignature::ScalarSig()) ==
        FunctionalHash(p, InputSignature::ScalarSig()));
}

TEST_CASE("hex round trip of hash values") {
  const HashValue h =
      FunctionalHash(ParseProgram(assets::Lion()), InputSignature::ScalarSig());
  CHECK(HashValue::FromHex(h.Hex()) == h);
  CHECK(h.Hex().size() == 32);
}

TEST_SUITE_END();

}  // namespace
}  // namespace optimforge
