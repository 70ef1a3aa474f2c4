// SPDX-License-Identifier: Apache-2.0
#include "faultfs/hdf5/repair.hpp"

#include <cmath>
#include <string>

#include "faultfs/common/error.hpp"
#include "faultfs/hdf5/parser.hpp"

namespace faultfs::hdf5 {

std::string_view to_string(DiagnosisKind k) {
  switch (k) {
    case DiagnosisKind::Clean: return "Clean";
    case DiagnosisKind::ExponentBiasFault: return "ExponentBiasFault";
    case DiagnosisKind::FpLayoutFault: return "FpLayoutFault";
    case DiagnosisKind::ArdFault: return "ArdFault";
    case DiagnosisKind::Unknown: return "Unknown";
  }
  return "?";
}

double unit_tolerance(const FloatProperty& prop) { return prop.size <= 4 ? 1e-6 : 1e-12; }

std::optional<int> power_of_two_exponent(double avg, double tol) {
  if (!std::isfinite(avg) || avg <= 0.0) return std::nullopt;
  int e = 0;
  const double m = std::frexp(avg, &e);  // avg = m * 2^e, m in [0.5, 1)
  if (std::fabs(2.0 * m - 1.0) <= tol) return e - 1;
  if (std::fabs(m - 1.0) <= tol) return e;  // just below the next power
  return std::nullopt;
}

Diagnosis diagnose(const Hdf5Model& model, DataStats stats) {
  if (model.layout.address != model.metadata_size) return {DiagnosisKind::ArdFault};
  // Some layout corruptions decode positive data unchanged, so the
  // constraints are checked before the average can vouch for the file.
  if (!model.dtype.layout_consistent()) return {DiagnosisKind::FpLayoutFault};
  const double tol = unit_tolerance(model.dtype);
  if (std::fabs(stats.average - 1.0) <= tol) return {DiagnosisKind::Clean};
  if (auto e = power_of_two_exponent(stats.average, tol)) {
    return {DiagnosisKind::ExponentBiasFault, *e};
  }
  return {DiagnosisKind::Unknown};
}

FloatProperty correct_exponent_bias(FloatProperty prop, double avg) {
  auto e = power_of_two_exponent(avg, unit_tolerance(prop));
  if (!e) throw PreconditionError("average " + std::to_string(avg) + " is not a power of two");
  prop.exponent_bias = static_cast<std::uint32_t>(static_cast<std::int64_t>(prop.exponent_bias) + *e);
  return prop;
}

FloatProperty correct_fp_layout(FloatProperty prop, unsigned bit_precision) {
  prop.mantissa_location = 0;
  const bool loc_ok = prop.exponent_location == prop.mantissa_size;
  const bool sum_ok = prop.mantissa_size + prop.exponent_size + 1u == bit_precision;
  if (loc_ok && sum_ok) return prop;
  if (!loc_ok && !sum_ok) {
    // A wrong mantissa size breaks both constraints at once.
    if (prop.exponent_location + prop.exponent_size + 1u != bit_precision) {
      throw Unrepairable("more than one floating-point layout field is inconsistent");
    }
    prop.mantissa_size = prop.exponent_location;
  } else if (!loc_ok) {
    prop.exponent_location = prop.mantissa_size;
  } else {
    if (prop.mantissa_size + 1u >= bit_precision) {
      throw Unrepairable("mantissa size leaves no room for an exponent");
    }
    prop.exponent_size = static_cast<std::uint8_t>(bit_precision - 1 - prop.mantissa_size);
  }
  return prop;
}

Hdf5Model correct_ard(Hdf5Model model) {
  model.layout.address = model.metadata_size;
  return model;
}

namespace {

void put(Bytes& file, const Hdf5Model& model, std::string_view name, std::uint64_t v) {
  const FieldSpan& f = model.field(name);
  store_le(std::span(file).subspan(f.offset, f.length), v, f.length);
}

}  // namespace

void patch_datatype(Bytes& file, const Hdf5Model& model, const FloatProperty& p) {
  put(file, model, "datatype.sign_location", p.sign_location);
  put(file, model, "datatype.size", p.size);
  put(file, model, "datatype.bit_offset", p.bit_offset);
  put(file, model, "datatype.bit_precision", p.bit_precision);
  put(file, model, "datatype.exponent_location", p.exponent_location);
  put(file, model, "datatype.exponent_size", p.exponent_size);
  put(file, model, "datatype.mantissa_location", p.mantissa_location);
  put(file, model, "datatype.mantissa_size", p.mantissa_size);
  put(file, model, "datatype.exponent_bias", p.exponent_bias);
}

void patch_ard(Bytes& file, const Hdf5Model& model, std::uint64_t ard) {
  put(file, model, "layout.address", ard);
}

namespace {

void note(std::vector<std::string>& out, const char* field, std::uint64_t from, std::uint64_t to) {
  if (from != to) {
    out.push_back(std::string(field) + ": " + std::to_string(from) + " -> " + std::to_string(to));
  }
}

}  // namespace

RepairReport auto_repair(Bytes& file) {
  RepairReport r;
  Hdf5Model model;
  try {
    model = parse_file(file);
    r.average_before = read_dataset(file, model).mean();
  } catch (const std::exception& e) {
    r.error = e.what();
    return r;
  }
  r.before = diagnose(model, {r.average_before});

  Bytes fixed = file;
  try {
    switch (r.before.kind) {
      case DiagnosisKind::Clean: return r;
      case DiagnosisKind::Unknown:
        r.error = "no correction rule for this symptom";
        return r;
      case DiagnosisKind::ArdFault: {
        const Hdf5Model m2 = correct_ard(model);
        note(r.changes, "layout.address", model.layout.address, m2.layout.address);
        patch_ard(fixed, model, m2.layout.address);
        break;
      }
      case DiagnosisKind::ExponentBiasFault: {
        const FloatProperty p = correct_exponent_bias(model.dtype, r.average_before);
        note(r.changes, "datatype.exponent_bias", model.dtype.exponent_bias, p.exponent_bias);
        patch_datatype(fixed, model, p);
        break;
      }
      case DiagnosisKind::FpLayoutFault: {
        const FloatProperty& o = model.dtype;
        const FloatProperty p = correct_fp_layout(o, o.storage_bits());
        note(r.changes, "datatype.exponent_location", o.exponent_location, p.exponent_location);
        note(r.changes, "datatype.exponent_size", o.exponent_size, p.exponent_size);
        note(r.changes, "datatype.mantissa_location", o.mantissa_location, p.mantissa_location);
        note(r.changes, "datatype.mantissa_size", o.mantissa_size, p.mantissa_size);
        patch_datatype(fixed, model, p);
        break;
      }
    }
    const Hdf5Model m2 = parse_file(fixed);
    r.average_after = read_dataset(fixed, m2).mean();
    r.after = diagnose(m2, {r.average_after});
  } catch (const std::exception& e) {
    r.error = e.what();
    return r;
  }
  if (r.after->kind == DiagnosisKind::Clean) {
    file = std::move(fixed);
    r.applied = true;
  } else {
    r.error = "correction did not restore a clean file; left unchanged";
  }
  return r;
}

}  // namespace faultfs::hdf5
