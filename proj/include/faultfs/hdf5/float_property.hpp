// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>

#include "faultfs/common/bytes.hpp"

namespace faultfs::hdf5 {

enum class Precision : std::uint8_t { F32, F64 };

/// Bit-level description of a floating-point element as stored in a
/// class-1 datatype message.
struct FloatProperty {
  std::uint32_t size = 8;  ///< element size in bytes
  bool big_endian = false;
  std::uint8_t mantissa_normalization = 2;  ///< 0 none, 1 msb set, 2 implied
  std::uint8_t sign_location = 63;
  std::uint16_t bit_offset = 0;
  std::uint16_t bit_precision = 64;
  std::uint8_t exponent_location = 52;
  std::uint8_t exponent_size = 11;
  std::uint8_t mantissa_location = 0;
  std::uint8_t mantissa_size = 52;
  std::uint32_t exponent_bias = 0x3FF;

  static FloatProperty ieee(Precision p);

  /// Number of bits available to the fields, derived from the element size.
  unsigned storage_bits() const { return 8 * size; }

  /// exponent_location == mantissa_size, mantissa_size + exponent_size ==
  /// storage_bits() - 1, mantissa_location == 0.
  bool layout_consistent() const;

  friend bool operator==(const FloatProperty&, const FloatProperty&) = default;
};

/// Decodes one little-endian element. Throws std::invalid_argument when the
/// property cannot describe a value (fields outside the element, unknown
/// normalization, big-endian order).
double decode_float(const FloatProperty& prop, ByteSpan element);

/// Checks that decode_float can succeed for this property.
void check_decodable(const FloatProperty& prop);

}  // namespace faultfs::hdf5
