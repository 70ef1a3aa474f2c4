// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "faultfs/hdf5/model.hpp"

namespace faultfs::hdf5 {

/// Disjoint, sorted spans that exactly cover [0, size).
struct FieldMap {
  std::vector<FieldSpan> spans;
  std::uint64_t size = 0;

  /// Span containing `offset`; throws std::out_of_range past the end.
  const FieldSpan& at(std::uint64_t offset) const;
  std::uint64_t bytes_with(FieldRole role) const;
};

/// Classifies every metadata byte. Bytes no parser step touched (alignment
/// between structures or heap strings) are labeled reserved.
FieldMap build_field_map(const Hdf5Model& model);

}  // namespace faultfs::hdf5
