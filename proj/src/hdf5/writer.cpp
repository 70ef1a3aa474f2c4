// SPDX-License-Identifier: Apache-2.0
#include "faultfs/hdf5/writer.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <string_view>

#include "faultfs/common/error.hpp"
#include "faultfs/hdf5/model.hpp"

namespace faultfs::hdf5 {

namespace {

// Fixed placement of the metadata structures.
constexpr std::uint64_t kRootHeader = 96;
constexpr std::uint64_t kBtree = 136;
constexpr std::uint64_t kHeap = 680;
constexpr std::uint64_t kHeapData = 712;
constexpr std::uint64_t kHeapDataSize = 88;
constexpr std::uint64_t kDatasetHeader = 800;
constexpr std::uint64_t kSymbolNode = 1072;
constexpr std::uint64_t kMetadataEnd = 1400;
constexpr std::uint16_t kLeafK = 4;
constexpr std::uint16_t kInternalK = 16;
constexpr std::uint64_t kEofField = 40;
constexpr std::uint64_t kSuperblockEnd = 96;

class Out {
 public:
  explicit Out(Bytes& b) : b_(b) {}
  void u8(std::uint64_t at, std::uint8_t v) { b_[at] = v; }
  void u16(std::uint64_t at, std::uint16_t v) { store_le(span(at, 2), v); }
  void u32(std::uint64_t at, std::uint32_t v) { store_le(span(at, 4), v); }
  void u64(std::uint64_t at, std::uint64_t v) { store_le(span(at, 8), v); }
  void raw(std::uint64_t at, std::string_view s) { std::memcpy(&b_[at], s.data(), s.size()); }

 private:
  std::span<std::uint8_t> span(std::uint64_t at, std::size_t n) { return {&b_[at], n}; }
  Bytes& b_;
};

void message_header(Out& o, std::uint64_t at, std::uint16_t type, std::uint16_t size,
                    std::uint8_t flags) {
  o.u16(at, type);
  o.u16(at + 2, size);
  o.u8(at + 4, flags);
}

}  // namespace

EncodedFile write_dataset(const DensityGrid& grid, Precision precision) {
  for (std::size_t d : grid.dims) {
    if (d < 1) throw ConfigError("grid dimensions must be >= 1");
  }
  if (grid.cells.size() != grid.dims[0] * grid.dims[1] * grid.dims[2]) {
    throw ConfigError("grid cell count does not match its dimensions");
  }
  const FloatProperty fp = FloatProperty::ieee(precision);
  const std::uint64_t raw_size = grid.cells.size() * fp.size;

  EncodedFile file;
  file.metadata_size = kMetadataEnd;
  file.bytes.assign(kMetadataEnd + raw_size, 0);
  Out o(file.bytes);

  // Superblock v0 and root symbol table entry.
  std::copy(kSignature.begin(), kSignature.end(), file.bytes.begin());
  o.u8(13, 8);  // sizeof offsets
  o.u8(14, 8);  // sizeof lengths
  o.u16(16, kLeafK);
  o.u16(18, kInternalK);
  o.u64(24, 0);
  o.u64(32, kUndefAddr);
  o.u64(kEofField, file.bytes.size());
  o.u64(48, kUndefAddr);
  o.u64(56, 0);
  o.u64(64, kRootHeader);
  o.u32(72, 1);  // cached symbol table
  o.u64(80, kBtree);
  o.u64(88, kHeap);

  // Root group object header: one symbol table message.
  o.u8(kRootHeader, 1);
  o.u16(kRootHeader + 2, 1);
  o.u32(kRootHeader + 4, 1);
  o.u32(kRootHeader + 8, 24);
  message_header(o, kRootHeader + 16, 0x11, 16, 0);
  o.u64(kRootHeader + 24, kBtree);
  o.u64(kRootHeader + 32, kHeap);

  // Group B-tree leaf with a single child.
  o.raw(kBtree, "TREE");
  o.u8(kBtree + 4, 0);
  o.u8(kBtree + 5, 0);
  o.u16(kBtree + 6, 1);
  o.u64(kBtree + 8, kUndefAddr);
  o.u64(kBtree + 16, kUndefAddr);
  o.u64(kBtree + 24, 0);
  o.u64(kBtree + 32, kSymbolNode);
  o.u64(kBtree + 40, 8);

  // Local heap: "" at 0, the dataset name at 8, one free block after it.
  o.raw(kHeap, "HEAP");
  o.u64(kHeap + 8, kHeapDataSize);
  o.u64(kHeap + 16, 16);
  o.u64(kHeap + 24, kHeapData);
  o.raw(kHeapData + 8, kDatasetName);
  o.u64(kHeapData + 16, 1);
  o.u64(kHeapData + 24, kHeapDataSize - 16);

  // Dataset object header.
  const std::uint64_t h = kDatasetHeader;
  o.u8(h, 1);
  o.u16(h + 2, 5);
  o.u32(h + 4, 1);
  o.u32(h + 8, 256);

  std::uint64_t m = h + 16;
  message_header(o, m, 0x01, 56, 0);  // dataspace
  o.u8(m + 8, 1);
  o.u8(m + 9, 3);
  o.u8(m + 10, 1);
  for (int i = 0; i < 3; ++i) {
    o.u64(m + 16 + 8 * i, grid.dims[i]);
    o.u64(m + 40 + 8 * i, grid.dims[i]);
  }

  m += 64;
  message_header(o, m, 0x03, 24, 1);  // datatype
  o.u8(m + 8, 0x11);
  o.u8(m + 9, 0x20);
  o.u8(m + 10, fp.sign_location);
  o.u32(m + 12, fp.size);
  o.u16(m + 16, fp.bit_offset);
  o.u16(m + 18, fp.bit_precision);
  o.u8(m + 20, fp.exponent_location);
  o.u8(m + 21, fp.exponent_size);
  o.u8(m + 22, fp.mantissa_location);
  o.u8(m + 23, fp.mantissa_size);
  o.u32(m + 24, fp.exponent_bias);

  m += 32;
  message_header(o, m, 0x05, 8, 1);  // fill value
  o.u8(m + 8, 2);
  o.u8(m + 9, 2);
  o.u8(m + 10, 2);
  o.u8(m + 11, 1);

  m += 16;
  message_header(o, m, 0x08, 24, 0);  // layout
  o.u8(m + 8, 3);
  o.u8(m + 9, 1);
  o.u64(m + 10, kMetadataEnd);
  o.u64(m + 18, raw_size);

  m += 32;
  message_header(o, m, 0x00, static_cast<std::uint16_t>(h + 16 + 256 - m - 8), 0);

  // Symbol table node.
  o.raw(kSymbolNode, "SNOD");
  o.u8(kSymbolNode + 4, 1);
  o.u16(kSymbolNode + 6, 1);
  o.u64(kSymbolNode + 8, 8);
  o.u64(kSymbolNode + 16, kDatasetHeader);

  std::uint8_t* raw = file.bytes.data() + kMetadataEnd;
  for (std::size_t i = 0; i < grid.cells.size(); ++i) {
    if (precision == Precision::F64) {
      store_le(std::span(raw + 8 * i, 8), std::bit_cast<std::uint64_t>(grid.cells[i]));
    } else {
      const float f = static_cast<float>(grid.cells[i]);
      store_le(std::span(raw + 4 * i, 4), std::bit_cast<std::uint32_t>(f));
    }
  }
  return file;
}

std::vector<PlannedWrite> plan_writes(const EncodedFile& file, std::size_t chunk) {
  if (chunk == 0) throw ConfigError("write chunk must be positive");
  std::vector<PlannedWrite> plan;
  const Bytes& b = file.bytes;
  for (std::uint64_t at = file.metadata_size; at < b.size(); at += chunk) {
    const std::uint64_t end = std::min<std::uint64_t>(b.size(), at + chunk);
    plan.push_back({at, Bytes(b.begin() + at, b.begin() + end)});
  }
  PlannedWrite meta{0, Bytes(b.begin(), b.begin() + file.metadata_size)};
  store_le(std::span(meta.data).subspan(kEofField, 8), kUndefAddr, 8);
  plan.push_back(std::move(meta));
  plan.push_back({0, Bytes(b.begin(), b.begin() + kSuperblockEnd)});
  return plan;
}

}  // namespace faultfs::hdf5
