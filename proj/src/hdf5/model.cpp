// SPDX-License-Identifier: Apache-2.0
#include "faultfs/hdf5/model.hpp"

#include <algorithm>

namespace faultfs::hdf5 {

std::string_view to_string(FieldRole r) {
  switch (r) {
    case FieldRole::Reserved: return "reserved";
    case FieldRole::Signature: return "signature";
    case FieldRole::Version: return "version";
    case FieldRole::FpProperty: return "fp-property";
    case FieldRole::Layout: return "layout";
    case FieldRole::Dims: return "dims";
    case FieldRole::Other: return "other";
  }
  return "?";
}

std::string_view to_string(ParseErrorKind k) {
  switch (k) {
    case ParseErrorKind::BadSignature: return "BadSignature";
    case ParseErrorKind::UnsupportedVersion: return "UnsupportedVersion";
    case ParseErrorKind::TruncatedMessage: return "TruncatedMessage";
    case ParseErrorKind::AddressOutOfBounds: return "AddressOutOfBounds";
    case ParseErrorKind::InvalidValue: return "InvalidValue";
    case ParseErrorKind::UnsupportedFeature: return "UnsupportedFeature";
    case ParseErrorKind::NotFound: return "NotFound";
  }
  return "?";
}

ParseError::ParseError(ParseErrorKind kind, std::uint64_t offset, std::string field,
                       const std::string& detail)
    : std::runtime_error(std::string(to_string(kind)) + " at offset " + std::to_string(offset) +
                         " (" + field + "): " + detail),
      kind_(kind),
      offset_(offset),
      field_(std::move(field)) {}

std::uint64_t Hdf5Model::element_count() const {
  std::uint64_t n = 1;
  for (std::uint64_t d : dims) n *= d;
  return n;
}

const FieldSpan& Hdf5Model::field(std::string_view name) const {
  auto it = std::find_if(fields.begin(), fields.end(),
                         [&](const FieldSpan& f) { return f.name == name; });
  if (it == fields.end()) throw std::out_of_range("no field named " + std::string(name));
  return *it;
}

}  // namespace faultfs::hdf5
