// SPDX-License-Identifier: Apache-2.0
#include "faultfs/hdf5/float_property.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace faultfs::hdf5 {

FloatProperty FloatProperty::ieee(Precision p) {
  FloatProperty f;
  if (p == Precision::F32) {
    f.size = 4;
    f.sign_location = 31;
    f.bit_precision = 32;
    f.exponent_location = 23;
    f.exponent_size = 8;
    f.mantissa_size = 23;
    f.exponent_bias = 0x7F;
  }
  return f;
}

bool FloatProperty::layout_consistent() const {
  return exponent_location == mantissa_size &&
         mantissa_size + exponent_size + 1u == storage_bits() && mantissa_location == 0;
}

namespace {

std::uint64_t bits(std::uint64_t word, unsigned pos, unsigned len) {
  if (len == 0) return 0;
  const std::uint64_t v = word >> pos;
  return len >= 64 ? v : v & ((std::uint64_t{1} << len) - 1);
}

}  // namespace

void check_decodable(const FloatProperty& p) {
  const unsigned nbits = p.storage_bits();
  auto fail = [](const std::string& what) { throw std::invalid_argument(what); };
  if (p.size < 1 || p.size > 8) fail("element size " + std::to_string(p.size) + " unsupported");
  if (p.big_endian) fail("big-endian floating point unsupported");
  if (p.mantissa_normalization > 2) fail("reserved mantissa normalization");
  if (p.sign_location >= nbits) fail("sign location outside element");
  if (p.exponent_size < 1 || p.exponent_size > 62 ||
      p.exponent_location + p.exponent_size > nbits) {
    fail("exponent field outside element");
  }
  if (p.mantissa_size > 63 || p.mantissa_location + p.mantissa_size > nbits) {
    fail("mantissa field outside element");
  }
}

double decode_float(const FloatProperty& p, ByteSpan element) {
  check_decodable(p);
  const std::uint64_t word = load_le(element, p.size);
  const bool negative = bits(word, p.sign_location, 1) != 0;
  const std::uint64_t e = bits(word, p.exponent_location, p.exponent_size);
  const std::uint64_t m = bits(word, p.mantissa_location, p.mantissa_size);
  const std::uint64_t e_max = (std::uint64_t{1} << p.exponent_size) - 1;

  double v;
  if (e == e_max) {
    v = m == 0 ? std::numeric_limits<double>::infinity()
               : std::numeric_limits<double>::quiet_NaN();
  } else {
    const double frac = std::ldexp(static_cast<double>(m), -static_cast<int>(p.mantissa_size));
    std::int64_t scale = static_cast<std::int64_t>(e) - static_cast<std::int64_t>(p.exponent_bias);
    double significand = frac;
    if (p.mantissa_normalization == 2) {
      if (e == 0) {
        scale += 1;  // subnormal
      } else {
        significand += 1.0;
      }
    }
    scale = std::clamp<std::int64_t>(scale, -4000, 4000);
    v = std::ldexp(significand, static_cast<int>(scale));
  }
  return negative ? -v : v;
}

}  // namespace faultfs::hdf5
