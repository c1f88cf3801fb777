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

#include "optimforge/assets.hpp"

#include <array>

namespace optimforge::assets {

namespace {

constexpr std::string_view kAdamW =
    "def train(w, g, m, v, lr):\n"
    "  g2 = square(g)\n"
    "  m = interp(g, m, 0.9)\n"
    "  v = interp(g2, v, 0.999)\n"
    "  sqrt_v = sqrt(v)\n"
    "  update = m / sqrt_v\n"
    "  wd = w * 0.01\n"
    "  update = update + wd\n"
    "  lr = lr * 0.001\n"
    "  update = update * lr\n"
    "  return update, m, v\n";

constexpr std::string_view kLion =
    "def train(w, g, m, v, lr):\n"
    "  update = interp(g, m, 0.9)\n"
    "  update = sign(update)\n"
    "  m = interp(g, m, 0.99)\n"
    "  wd = w * 0.1\n"
    "  update = update + wd\n"
    "  update = update * lr\n"
    "  return update, m, v\n";

constexpr std::string_view kRaw =
    "def train(w, g, m, v, lr):\n"
    "  g = clip(g, lr)\n"
    "  m = clip(m, lr)\n"
    "  v845 = sqrt(0.6270633339881897)\n"
    "  v968 = sign(v)\n"
    "  v968 = v - v\n"
    "  g = arcsin(g)\n"
    "  m = interp(g, v, 0.8999999761581421)\n"
    "  v1 = m * m\n"
    "  v = interp(g, m, 1.109133005142212)\n"
    "  v845 = tanh(v845)\n"
    "  lr = lr * 0.0002171761734643951\n"
    "  update = m * lr\n"
    "  v1 = sqrt(v1)\n"
    "  update = update / v1\n"
    "  wd = lr * 0.4601978361606598\n"
    "  v1 = square(v1)\n"
    "  wd = wd * w\n"
    "  m = cosh(update)\n"
    "  lr = tan(1.4572199583053589)\n"
    "  update = update + wd\n"
    "  lr = cos(v845)\n"
    "  return update, m, v\n";

constexpr std::string_view kDiscovered =
    "def train(w, g, m, v, lr):\n"
    "  g = clip(g, lr)\n"
    "  g = arcsin(g)\n"
    "  m = interp(g, v, 0.8999999761581421)\n"
    "  m2 = m * m\n"
    "  v = interp(g, m, 1.109133005142212)\n"
    "  lr = lr * 0.0002171761734643951\n"
    "  update = m * lr\n"
    "  abs_m = sqrt(m2)\n"
    "  update = update / abs_m\n"
    "  wd = lr * 0.4601978361606598\n"
    "  wd = wd * w\n"
    "  m = cosh(update)\n"
    "  update = update + wd\n"
    "  return update, m, v\n";

constexpr std::string_view kReg =
    "def train(w, g, m, v, lr):\n"
    "  m = interp(m, g, 0.16)\n"
    "  g2 = square(g)\n"
    "  v = interpolate(v, g2, 0.001)\n"
    "  v753 = dot(g, w)\n"
    "  sqrt_v = sqrt(v)\n"
    "  update = m / sqrt_v\n"
    "  wd = v753 * w\n"
    "  update = sin(update)\n"
    "  update = update + wd\n"
    "  lr = lr * 0.0216\n"
    "  update = update * lr\n"
    "  v = sin(v)\n"
    "  return update, m, v\n";

constexpr std::string_view kAdagrad =
    "def train(w, g, m, v, lr):\n"
    "  m = interp(m, g, 0.1)\n"
    "  g2 = square(g)\n"
    "  g2 = v + g2\n"
    "  v = interp(v, g2, 0.0015)\n"
    "  sqrt_v = sqrt(v)\n"
    "  update = m / sqrt_v\n"
    "  v70 = get_pi()\n"
    "  v = min(v, v70)\n"
    "  update = sinh(update)\n"
    "  lr = lr * 0.0606\n"
    "  update = update * lr\n"
    "  return update, m, v\n";

constexpr std::string_view kBelief =
    "def train(w, g, m, v, lr):\n"
    "  m = interp(m, g, 0.1)\n"
    "  g = g - m\n"
    "  g2 = square(g)\n"
    "  v = interp(v, g2, 0.001)\n"
    "  sqrt_v = sqrt(v)\n"
    "  update = m / sqrt_v\n"
    "  wd = w * 0.0238\n"
    "  update = update + wd\n"
    "  lr = lr * 0.03721\n"
    "  update = update * lr\n"
    "  return update, m, v\n";

constexpr std::array<std::pair<std::string_view, std::string_view>, 7> kAll = {{
    {"adamw", kAdamW},
    {"lion", kLion},
    {"raw", kRaw},
    {"discovered", kDiscovered},
    {"reg", kReg},
    {"adagrad", kAdagrad},
    {"belief", kBelief},
}};

}  // namespace

std::span<const std::pair<std::string_view, std::string_view>> All() {
  return kAll;
}

std::string_view Find(std::string_view name) {
  for (const auto& [key, text] : kAll)
    if (key == name) return text;
  return {};
}

std::string_view AdamW() { return kAdamW; }
std::string_view Lion() { return kLion; }
std::string_view RawLion() { return kRaw; }
std::string_view Discovered() { return kDiscovered; }

}  // namespace optimforge::assets
