/*
 * Copyright 2026 The codesched Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <array>
#include <cstdint>

namespace codesched::gf256 {

// GF(2^8) with primitive polynomial x^8 + x^4 + x^3 + x^2 + 1 (0x11d),
// generator 2. Log/exp tables are built at compile time.
namespace detail {

struct Tables {
  std::array<uint8_t, 512> exp{};
  std::array<uint8_t, 256> log{};

  constexpr Tables() {
    int x = 1;
    for (int i = 0; i < 255; ++i) {
      exp[static_cast<size_t>(i)] = static_cast<uint8_t>(x);
      log[static_cast<size_t>(x)] = static_cast<uint8_t>(i);
      x <<= 1;
      if (x & 0x100) x ^= 0x11d;
    }
    for (int i = 255; i < 512; ++i) {
      exp[static_cast<size_t>(i)] = exp[static_cast<size_t>(i - 255)];
    }
    log[0] = 0;  // unused; mul/inv guard against zero operands
  }
};

inline constexpr Tables tables{};

}  // namespace detail

inline constexpr uint8_t add(uint8_t a, uint8_t b) { return a ^ b; }
inline constexpr uint8_t sub(uint8_t a, uint8_t b) { return a ^ b; }

inline constexpr uint8_t mul(uint8_t a, uint8_t b) {
  if (a == 0 || b == 0) return 0;
  return detail::tables.exp[static_cast<size_t>(detail::tables.log[a]) +
                            static_cast<size_t>(detail::tables.log[b])];
}

// Multiplicative inverse; a must be nonzero.
inline constexpr uint8_t inv(uint8_t a) {
  return detail::tables.exp[static_cast<size_t>(255 - detail::tables.log[a])];
}

inline constexpr uint8_t div(uint8_t a, uint8_t b) { return mul(a, inv(b)); }

}  // namespace codesched::gf256
