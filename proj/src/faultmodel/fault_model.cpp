// SPDX-License-Identifier: Apache-2.0
#include "faultfs/faultmodel/fault_model.hpp"

#include <algorithm>
#include <string>

#include "faultfs/common/error.hpp"
#include "faultfs/common/random.hpp"

namespace faultfs::faultmodel {

std::string_view to_string(FaultKind kind) {
  switch (kind) {
    case FaultKind::BitFlip: return "BitFlip";
    case FaultKind::ShornWrite: return "ShornWrite";
    case FaultKind::DroppedWrite: return "DroppedWrite";
  }
  return "?";
}

std::optional<FaultKind> parse_fault_kind(std::string_view s) {
  for (FaultKind k : {FaultKind::BitFlip, FaultKind::ShornWrite, FaultKind::DroppedWrite}) {
    if (to_string(k) == s) return k;
  }
  return std::nullopt;
}

void FaultModel::validate() const {
  static_assert(kShornBlock % kShornGranule == 0);
  if (bitflip_n < 1) throw ConfigError("bitflip_n must be >= 1");
  if (shorn_keep_eighths < 1 || shorn_keep_eighths > 7) {
    throw ConfigError("shorn_keep_eighths must be in 1..7, got " +
                      std::to_string(shorn_keep_eighths));
  }
}

namespace {

void flip_bits(std::span<std::uint8_t> bytes, std::uint64_t start_bit, std::uint32_t n) {
  for (std::uint64_t k = start_bit; k < start_bit + n; ++k) {
    bytes[k / 8] ^= static_cast<std::uint8_t>(1u << (k % 8));
  }
}

}  // namespace

FaultedWrite apply_bit_flip(const WriteOp& op, std::uint64_t start_bit, std::uint32_t n) {
  const std::uint64_t total_bits = 8 * op.declared_size();
  if (n < 1 || start_bit > total_bits || n > total_bits - start_bit) {
    throw PreconditionError("bit flip [" + std::to_string(start_bit) + ", +" +
                            std::to_string(n) + ") outside " + std::to_string(total_bits) +
                            "-bit payload");
  }
  FaultedWrite out{Bytes(op.payload.begin(), op.payload.end()), op.declared_size()};
  flip_bits(out.effective_payload, start_bit, n);
  return out;
}

std::size_t shorn_kept_bytes(std::size_t block_len, std::uint32_t keep_eighths) {
  return (static_cast<std::size_t>(keep_eighths) * block_len + 7) / 8;
}

FaultedWrite apply_shorn_write(const WriteOp& op, const FaultModel& model,
                               std::uint64_t fill_seed, std::uint64_t fault_point) {
  const std::size_t size = op.payload.size();
  if (size == 0) throw PreconditionError("shorn write needs a non-empty payload");
  if (fault_point >= size) {
    throw PreconditionError("shorn fault point " + std::to_string(fault_point) +
                            " outside payload of " + std::to_string(size) + " bytes");
  }
  model.validate();

  FaultedWrite out{Bytes(op.payload.begin(), op.payload.end()), size};
  const std::size_t block_begin = (fault_point / FaultModel::kShornBlock) * FaultModel::kShornBlock;
  const std::size_t block_len = std::min(FaultModel::kShornBlock, size - block_begin);
  const std::size_t keep = shorn_kept_bytes(block_len, model.shorn_keep_eighths);
  if (keep >= block_len) return out;

  // The tail repeats the last preserved granule. The PRNG only touches the
  // byte at each 8-aligned file position, i.e. the least significant byte of
  // any naturally aligned little-endian word, so the garbage stays close in
  // magnitude to its neighbours.
  const std::size_t src_len = std::min(FaultModel::kShornGranule, keep);
  const std::size_t src_begin = block_begin + keep - src_len;
  Rng rng(fill_seed);
  std::span<std::uint8_t> data(out.effective_payload);
  for (std::size_t i = keep; i < block_len; ++i) {
    const std::size_t pos = block_begin + i;
    std::uint8_t b = data[src_begin + (i - keep) % src_len];
    if ((op.offset + pos) % 8 == 0) b ^= static_cast<std::uint8_t>(rng());
    data[pos] = b;
  }
  return out;
}

FaultedWrite apply_dropped_write(const WriteOp& op) {
  return FaultedWrite{Bytes{}, op.declared_size()};
}

std::uint64_t scalar_bit_count(std::span<const ScalarArg> args) {
  std::uint64_t bits = 0;
  for (const ScalarArg& a : args) bits += 8u * a.width;
  return bits;
}

std::vector<ScalarArg> corrupt_scalar_args(std::span<const ScalarArg> args,
                                           std::uint64_t start_bit, std::uint32_t n) {
  Bytes buf;
  for (const ScalarArg& a : args) {
    if (a.width < 1 || a.width > 8) throw PreconditionError("scalar width must be 1..8");
    const std::size_t at = buf.size();
    buf.resize(at + a.width);
    store_le(std::span(buf).subspan(at), a.value, a.width);
  }
  const std::uint64_t total_bits = 8 * buf.size();
  if (n < 1 || start_bit > total_bits || n > total_bits - start_bit) {
    throw PreconditionError("bit flip [" + std::to_string(start_bit) + ", +" +
                            std::to_string(n) + ") outside " + std::to_string(total_bits) +
                            "-bit argument tuple");
  }
  flip_bits(buf, start_bit, n);

  std::vector<ScalarArg> out;
  out.reserve(args.size());
  std::size_t at = 0;
  for (const ScalarArg& a : args) {
    out.push_back({load_le(ByteSpan(buf).subspan(at), a.width), a.width});
    at += a.width;
  }
  return out;
}

}  // namespace faultfs::faultmodel
