// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <cstring>
#include <span>
#include <string_view>
#include <type_traits>
#include <vector>

namespace faultfs {

using Bytes = std::vector<std::uint8_t>;
using ByteSpan = std::span<const std::uint8_t>;

/// Little-endian load of an unsigned integer of `width` bytes (1..8).
inline std::uint64_t load_le(ByteSpan src, std::size_t width) {
  std::uint64_t v = 0;
  for (std::size_t i = 0; i < width; ++i) {
    v |= static_cast<std::uint64_t>(src[i]) << (8 * i);
  }
  return v;
}

template <typename T>
  requires std::is_unsigned_v<T>
T load_le(ByteSpan src) {
  return static_cast<T>(load_le(src, sizeof(T)));
}

inline void store_le(std::span<std::uint8_t> dst, std::uint64_t v, std::size_t width) {
  for (std::size_t i = 0; i < width; ++i) {
    dst[i] = static_cast<std::uint8_t>(v >> (8 * i));
  }
}

template <typename T>
  requires std::is_unsigned_v<T>
void store_le(std::span<std::uint8_t> dst, T v) {
  store_le(dst, static_cast<std::uint64_t>(v), sizeof(T));
}

/// 64-bit FNV-1a; used for argument digests in session logs.
inline std::uint64_t fnv1a64(ByteSpan data, std::uint64_t h = 0xcbf29ce484222325ULL) {
  for (std::uint8_t b : data) {
    h ^= b;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::uint64_t fnv1a64(std::string_view s, std::uint64_t h = 0xcbf29ce484222325ULL) {
  return fnv1a64(ByteSpan(reinterpret_cast<const std::uint8_t*>(s.data()), s.size()), h);
}

}  // namespace faultfs
