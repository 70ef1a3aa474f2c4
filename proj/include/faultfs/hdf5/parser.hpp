// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "faultfs/common/bytes.hpp"
#include "faultfs/common/grid.hpp"
#include "faultfs/hdf5/model.hpp"

namespace faultfs::hdf5 {

/// Parses the supported subset and validates it the way the reference
/// library does on open. Throws ParseError naming the offending field.
Hdf5Model parse_file(ByteSpan file);

/// Decodes the dataset's raw data with the parsed datatype. Reads past the
/// physical end of the file yield zero bytes. Rank is padded to 3 with
/// trailing unit dimensions.
DensityGrid read_dataset(ByteSpan file, const Hdf5Model& model);

inline DensityGrid read_dataset(ByteSpan file) { return read_dataset(file, parse_file(file)); }

}  // namespace faultfs::hdf5
