// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>

namespace faultfs::interpose {

/// File operations exposed by the interposition layer. Each maps onto one
/// OS call against the backing root.
enum class Primitive : std::uint8_t {
  Open,
  Create,
  Read,
  Write,
  Truncate,
  Mknod,
  Chmod,
  Unlink,
  Rename,
  Getattr,
  Readdir,
  Mkdir,
  Rmdir,
  Fsync,
  Release,
};

inline constexpr std::size_t kPrimitiveCount = 15;

inline constexpr std::array<std::string_view, kPrimitiveCount> kPrimitiveNames = {
    "open",    "create",  "read",  "write", "truncate", "mknod", "chmod",  "unlink",
    "rename",  "getattr", "readdir", "mkdir", "rmdir",  "fsync", "release"};

constexpr std::string_view to_string(Primitive p) {
  return kPrimitiveNames[static_cast<std::size_t>(p)];
}

constexpr std::optional<Primitive> parse_primitive(std::string_view s) {
  for (std::size_t i = 0; i < kPrimitiveCount; ++i) {
    if (kPrimitiveNames[i] == s) return static_cast<Primitive>(i);
  }
  return std::nullopt;
}

}  // namespace faultfs::interpose
