// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "faultfs/common/bytes.hpp"
#include "faultfs/common/grid.hpp"
#include "faultfs/hdf5/float_property.hpp"

namespace faultfs::hdf5 {

struct EncodedFile {
  Bytes bytes;
  std::uint64_t metadata_size = 0;  ///< also the Address of Raw Data
};

/// Serializes `grid` as dataset "density" in the root group. Metadata comes
/// first, raw little-endian data follows immediately.
EncodedFile write_dataset(const DensityGrid& grid, Precision precision);

struct PlannedWrite {
  std::uint64_t offset = 0;
  Bytes data;
};

/// The order in which a library flushes such a file: raw data in `chunk`
/// sized pieces, then the whole metadata block with an undefined
/// end-of-file address, then the superblock again with the final address.
/// Applying the writes in order reproduces `file.bytes`.
std::vector<PlannedWrite> plan_writes(const EncodedFile& file, std::size_t chunk = 4096);

}  // namespace faultfs::hdf5
