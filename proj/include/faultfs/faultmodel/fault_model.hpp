// SPDX-License-Identifier: Apache-2.0
#pragma once

// Pure transformations that turn a healthy write into a faulty one. Every
// model is silent: the caller is always told the full size was written.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "faultfs/common/bytes.hpp"

namespace faultfs::faultmodel {

enum class FaultKind : std::uint8_t { BitFlip, ShornWrite, DroppedWrite };

std::string_view to_string(FaultKind kind);
std::optional<FaultKind> parse_fault_kind(std::string_view s);

struct FaultModel {
  static constexpr std::size_t kShornBlock = 4096;
  static constexpr std::size_t kShornGranule = 512;

  FaultKind kind = FaultKind::BitFlip;
  std::uint32_t bitflip_n = 2;
  std::uint32_t shorn_keep_eighths = 7;

  /// Throws ConfigError when the feature parameters are out of range.
  void validate() const;
};

/// One offset-addressed write as seen by the interposition layer.
/// `payload` is non-owning; its length is the declared size.
struct WriteOp {
  std::string path;
  std::uint64_t offset = 0;
  ByteSpan payload;

  std::uint64_t declared_size() const { return payload.size(); }
};

struct FaultedWrite {
  Bytes effective_payload;  ///< what actually reaches the backing store
  std::uint64_t reported_size = 0;
};

/// Inverts bits [start_bit, start_bit + n) of the payload. Bit k lives in
/// byte k / 8 at position k % 8 counted from the least significant bit.
FaultedWrite apply_bit_flip(const WriteOp& op, std::uint64_t start_bit, std::uint32_t n);

/// Keeps the first keep_eighths/8 of the block containing `fault_point`
/// (a byte index into the payload) and fills the rest of that block with
/// repeats of the last preserved granule, lightly perturbed by a PRNG
/// seeded with `fill_seed`. Other blocks pass through untouched.
FaultedWrite apply_shorn_write(const WriteOp& op, const FaultModel& model,
                               std::uint64_t fill_seed, std::uint64_t fault_point = 0);

FaultedWrite apply_dropped_write(const WriteOp& op);

/// Number of bytes of an affected block of `block_len` bytes that survive a
/// shorn write.
std::size_t shorn_kept_bytes(std::size_t block_len, std::uint32_t keep_eighths);

/// A metadata-bearing scalar argument (mknod mode/dev, chmod mode) and the
/// width of its little-endian serialization.
struct ScalarArg {
  std::uint64_t value = 0;
  std::uint8_t width = 4;

  friend bool operator==(const ScalarArg&, const ScalarArg&) = default;
};

std::uint64_t scalar_bit_count(std::span<const ScalarArg> args);

/// Bit-flip semantics over the concatenated little-endian encoding of `args`.
std::vector<ScalarArg> corrupt_scalar_args(std::span<const ScalarArg> args,
                                           std::uint64_t start_bit, std::uint32_t n);

}  // namespace faultfs::faultmodel
