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

#ifndef OPTIMFORGE_ASSETS_HPP_
#define OPTIMFORGE_ASSETS_HPP_

#include <span>
#include <string_view>
#include <utility>

namespace optimforge::assets {

// Embedded optimizer program texts, mirrored byte-for-byte by the files under
// programs/. Names: adamw, lion, raw, discovered, reg, adagrad, belief.
std::span<const std::pair<std::string_view, std::string_view>> All();

// Empty view if the name is unknown.
std::string_view Find(std::string_view name);

std::string_view AdamW();
std::string_view Lion();
std::string_view RawLion();
std::string_view Discovered();

}  // namespace optimforge::assets

#endif  // OPTIMFORGE_ASSETS_HPP_
