// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "faultfs/common/bytes.hpp"
#include "faultfs/common/outcome.hpp"
#include "faultfs/hdf5/field_map.hpp"

namespace faultfs::hdf5 {

/// Runs the downstream analysis on a corrupted copy of the file. Throwing
/// counts as a crash.
using ClassifyFn = std::function<OutcomeClass(ByteSpan corrupted)>;

struct SweepOptions {
  bool per_bit = false;  ///< all 8 bits of each byte instead of bit 0 only
  unsigned threads = 1;
};

struct SweepRecord {
  std::uint64_t offset = 0;
  unsigned bit = 0;
  std::string field;
  FieldRole role = FieldRole::Other;
  OutcomeClass outcome = OutcomeClass::Benign;
  std::string detail;  ///< exception text when the analysis failed
};

/// Flips each metadata byte (or bit) in turn and classifies the result.
/// Records are ordered by (offset, bit).
std::vector<SweepRecord> sweep_metadata(ByteSpan file, const FieldMap& map,
                                        const ClassifyFn& classify, const SweepOptions& opts = {});

struct SweepSummaryRow {
  std::string field;
  FieldRole role = FieldRole::Other;
  std::uint64_t injections = 0;
  std::array<std::uint64_t, 4> counts{};  ///< indexed by OutcomeClass
};

/// One row per field name (in file order) plus per-class totals.
std::vector<SweepSummaryRow> summarize_sweep(const std::vector<SweepRecord>& records);

void write_sweep_csv(std::ostream& os, const std::vector<SweepRecord>& records);
void write_sweep_summary(std::ostream& os, const std::vector<SweepRecord>& records);

}  // namespace faultfs::hdf5
