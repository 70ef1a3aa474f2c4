// SPDX-License-Identifier: Apache-2.0
#pragma once

// In-memory view of the supported file subset: superblock v0, a root group
// held in a v1 B-tree + local heap + symbol node, and one contiguous
// floating-point dataset described by a v1 object header.

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "faultfs/hdf5/float_property.hpp"

namespace faultfs::hdf5 {

inline constexpr std::array<std::uint8_t, 8> kSignature = {0x89, 'H', 'D', 'F', '\r', '\n', 0x1a, '\n'};
inline constexpr std::uint64_t kUndefAddr = ~std::uint64_t{0};
inline constexpr std::string_view kDatasetName = "density";

enum class FieldRole : std::uint8_t {
  Reserved,  ///< reserved, padding, or unused slots; never interpreted
  Signature,
  Version,
  FpProperty,
  Layout,
  Dims,
  Other,
};

std::string_view to_string(FieldRole r);

/// A named byte range in the file.
struct FieldSpan {
  std::string name;
  std::uint64_t offset = 0;
  std::uint64_t length = 0;
  FieldRole role = FieldRole::Other;

  std::uint64_t end() const { return offset + length; }
};

enum class ParseErrorKind : std::uint8_t {
  BadSignature,
  UnsupportedVersion,
  TruncatedMessage,
  AddressOutOfBounds,
  InvalidValue,
  UnsupportedFeature,
  NotFound,
};

std::string_view to_string(ParseErrorKind k);

class ParseError : public std::runtime_error {
 public:
  ParseError(ParseErrorKind kind, std::uint64_t offset, std::string field, const std::string& detail);

  ParseErrorKind kind() const { return kind_; }
  std::uint64_t offset() const { return offset_; }
  const std::string& field() const { return field_; }

 private:
  ParseErrorKind kind_;
  std::uint64_t offset_;
  std::string field_;
};

struct Superblock {
  std::uint16_t group_leaf_k = 4;
  std::uint16_t group_internal_k = 16;
  std::uint32_t consistency_flags = 0;
  std::uint64_t base_address = 0;
  std::uint64_t eof_address = 0;
  std::uint64_t root_header_address = 0;
  std::uint64_t root_cached_btree = kUndefAddr;
  std::uint64_t root_cached_heap = kUndefAddr;
};

struct GroupTable {
  std::uint64_t btree_address = 0;
  std::uint64_t heap_address = 0;
  std::uint64_t heap_data_address = 0;
  std::uint64_t heap_data_size = 0;
  std::uint64_t symbol_node_address = 0;
};

struct Layout {
  std::uint8_t version = 3;
  std::uint64_t address = 0;  ///< Address of Raw Data
  std::uint64_t size = 0;
};

struct Hdf5Model {
  Superblock superblock;
  GroupTable root;
  std::uint64_t dataset_header_address = 0;
  std::vector<std::uint64_t> dims;
  std::vector<std::uint64_t> max_dims;  ///< empty when not stored
  FloatProperty dtype;
  Layout layout;

  /// One past the last byte used by any metadata structure.
  std::uint64_t metadata_size = 0;
  std::uint64_t file_size = 0;

  /// Every field the parser interpreted or stepped over, in file order.
  std::vector<FieldSpan> fields;

  std::uint64_t element_count() const;
  const FieldSpan& field(std::string_view name) const;
};

}  // namespace faultfs::hdf5
