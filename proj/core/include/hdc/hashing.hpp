/*
 * Copyright 2026 The hdc Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef HDC_HASHING_HPP_
#define HDC_HASHING_HPP_

// Counter-based hashing used for every pseudo-random quantity in the engine.
// Values depend only on their inputs, never on call order or thread, and are
// identical on every platform (no std:: distributions involved).

#include <cmath>
#include <cstdint>
#include <numbers>
#include <string_view>

namespace hdc {

inline constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline constexpr std::uint64_t fnv1a64(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline constexpr std::uint64_t hash_combine(std::uint64_t seed, std::uint64_t value) {
  return splitmix64(seed ^ splitmix64(value + 0x632be59bd9b4e019ULL));
}

template <typename... Rest>
constexpr std::uint64_t hash_values(std::uint64_t first, Rest... rest) {
  std::uint64_t h = splitmix64(first);
  ((h = hash_combine(h, static_cast<std::uint64_t>(rest))), ...);
  return h;
}

__extension__ using uint128_t = unsigned __int128;

// Maps a hash to [0, bound) by multiply-shift.
inline std::uint64_t bounded(std::uint64_t hash, std::uint64_t bound) {
  return static_cast<std::uint64_t>((static_cast<uint128_t>(hash) * bound) >> 64);
}

// Uniform double in (0, 1]; never zero so it is safe under log().
inline double unit_interval(std::uint64_t hash) {
  return (static_cast<double>(hash >> 11) + 1.0) * 0x1.0p-53;
}

// Standard normal deviate from a single hash via Box-Muller.
inline double standard_normal(std::uint64_t hash) {
  const double u1 = unit_interval(hash);
  const double u2 = unit_interval(splitmix64(hash ^ 0xd1b54a32d192ed03ULL));
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace hdc

#endif  // HDC_HASHING_HPP_
