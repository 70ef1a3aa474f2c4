// SPDX-License-Identifier: Apache-2.0
#pragma once

// Detection and correction of metadata faults in files whose data is known
// to average exactly 1 when healthy.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "faultfs/common/bytes.hpp"
#include "faultfs/hdf5/model.hpp"

namespace faultfs::hdf5 {

enum class DiagnosisKind : std::uint8_t { Clean, ExponentBiasFault, FpLayoutFault, ArdFault, Unknown };

std::string_view to_string(DiagnosisKind k);

struct Diagnosis {
  DiagnosisKind kind = DiagnosisKind::Unknown;
  int log2_scale = 0;  ///< set for ExponentBiasFault
};

struct DataStats {
  double average = 0.0;
};

class Unrepairable : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// |avg - 1| tolerance for the element precision.
double unit_tolerance(const FloatProperty& prop);

/// log2(avg) when avg is a power of two within `tol` (relative).
std::optional<int> power_of_two_exponent(double avg, double tol);

/// Checks, in order: the raw-data address against the metadata size, the
/// average against 1, the floating-point layout constraints, and finally
/// whether the average is a power of two.
Diagnosis diagnose(const Hdf5Model& model, DataStats stats);

/// Shifts the exponent bias by log2(avg). Throws PreconditionError unless avg
/// is a power of two.
FloatProperty correct_exponent_bias(FloatProperty prop, double avg);

/// Recomputes the single field that breaks exponent_location == mantissa_size
/// and mantissa_size + exponent_size == bit_precision - 1; mantissa_location
/// is reset to 0. Throws Unrepairable if no single change satisfies both.
FloatProperty correct_fp_layout(FloatProperty prop, unsigned bit_precision);

Hdf5Model correct_ard(Hdf5Model model);

/// Writes the floating-point fields of `prop` over the datatype message.
void patch_datatype(Bytes& file, const Hdf5Model& model, const FloatProperty& prop);
void patch_ard(Bytes& file, const Hdf5Model& model, std::uint64_t ard);

struct RepairReport {
  Diagnosis before;
  std::optional<Diagnosis> after;  ///< set when a repair was attempted
  bool applied = false;
  double average_before = 0.0;
  double average_after = 0.0;
  std::vector<std::string> changes;  ///< "field: old -> new"
  std::string error;                 ///< parse failure or reason for not repairing
};

/// Diagnoses `file` and applies the matching correction in place. The bytes
/// are only changed when the corrected file re-diagnoses Clean.
RepairReport auto_repair(Bytes& file);

}  // namespace faultfs::hdf5
