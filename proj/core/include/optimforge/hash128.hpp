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

#ifndef OPTIMFORGE_HASH128_HPP_
#define OPTIMFORGE_HASH128_HPP_

#include <cstdint>
#include <cstring>
#include <string>
#include <string_view>

namespace optimforge {

// 128-bit keyed digest used for functional hashing. The key is a fixed,
// versioned constant so digests are stable across runs and platforms and
// cached fitness tables can be reused between runs.
struct HashValue {
  std::uint64_t hi = 0;
  std::uint64_t lo = 0;

  friend bool operator==(const HashValue&, const HashValue&) = default;
  friend auto operator<=>(const HashValue&, const HashValue&) = default;

  std::string Hex() const {
    static const char* digits = "0123456789abcdef";
    std::string out(32, '0');
    for (int i = 0; i < 16; ++i) out[i] = digits[(hi >> (60 - 4 * i)) & 0xf];
    for (int i = 0; i < 16; ++i) out[16 + i] = digits[(lo >> (60 - 4 * i)) & 0xf];
    return out;
  }

  static HashValue FromHex(std::string_view hex) {
    HashValue h;
    for (int i = 0; i < 16 && i < static_cast<int>(hex.size()); ++i)
      h.hi = (h.hi << 4) | NibbleOf(hex[i]);
    for (int i = 16; i < 32 && i < static_cast<int>(hex.size()); ++i)
      h.lo = (h.lo << 4) | NibbleOf(hex[i]);
    return h;
  }

 private:
  static std::uint64_t NibbleOf(char c) {
    if (c >= '0' && c <= '9') return static_cast<std::uint64_t>(c - '0');
    if (c >= 'a' && c <= 'f') return static_cast<std::uint64_t>(c - 'a' + 10);
    if (c >= 'A' && c <= 'F') return static_cast<std::uint64_t>(c - 'A' + 10);
    return 0;
  }
};

struct HashValueHasher {
  std::size_t operator()(const HashValue& h) const noexcept {
    return static_cast<std::size_t>(h.hi ^ (h.lo * 0x9e3779b97f4a7c15ULL));
  }
};

namespace detail {

inline std::uint64_t Mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace detail

// Digest algorithm version; bump when the byte encoding or mixing changes.
inline constexpr std::uint64_t kDigestKeyHi = 0x0f17f09e76010001ULL;
inline constexpr std::uint64_t kDigestKeyLo = 0xc3a5c85c97cb3127ULL;

inline HashValue HashCombine(HashValue a, HashValue b) {
  HashValue out;
  out.hi = detail::Mix64(a.hi ^ (b.lo * 0xff51afd7ed558ccdULL) + kDigestKeyHi);
  out.lo = detail::Mix64(a.lo + (b.hi ^ 0xc4ceb9fe1a85ec53ULL) + kDigestKeyLo);
  out.hi ^= detail::Mix64(out.lo + b.hi);
  out.lo ^= detail::Mix64(out.hi + a.lo);
  return out;
}

inline HashValue HashBytes(std::string_view bytes, std::uint64_t tag = 0) {
  HashValue h{kDigestKeyHi ^ tag, kDigestKeyLo + bytes.size()};
  std::size_t i = 0;
  while (i + 8 <= bytes.size()) {
    std::uint64_t word;
    std::memcpy(&word, bytes.data() + i, 8);
    h = HashCombine(h, HashValue{word, tag});
    i += 8;
  }
  std::uint64_t last = 0;
  for (std::size_t j = i; j < bytes.size(); ++j)
    last = (last << 8) | static_cast<unsigned char>(bytes[j]);
  h = HashCombine(h, HashValue{last, bytes.size()});
  return h;
}

inline HashValue HashU64(std::uint64_t word, std::uint64_t tag) {
  return HashCombine(HashValue{kDigestKeyHi, kDigestKeyLo ^ tag},
                     HashValue{word, tag});
}

}  // namespace optimforge

#endif  // OPTIMFORGE_HASH128_HPP_
