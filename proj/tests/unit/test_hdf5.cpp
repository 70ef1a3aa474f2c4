// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <bit>
#include <cmath>
#include <random>

#include "faultfs/common/error.hpp"
#include "faultfs/hdf5/field_map.hpp"
#include "faultfs/hdf5/parser.hpp"
#include "faultfs/hdf5/repair.hpp"
#include "faultfs/hdf5/sweep.hpp"
#include "faultfs/hdf5/writer.hpp"
#include "helpers/fixtures.hpp"

using namespace faultfs;
using namespace faultfs::hdf5;

namespace {

DensityGrid random_grid(std::mt19937_64& rng, std::size_t max_dim) {
  DensityGrid g(1 + rng() % max_dim, 1 + rng() % max_dim, 1 + rng() % max_dim);
  std::uniform_real_distribution<double> u(-1e3, 1e3);
  for (double& c : g.cells) c = u(rng);
  return g;
}

std::uint64_t field_offset(const Bytes& file, std::string_view name) {
  return parse_file(file).field(name).offset;
}

ParseErrorKind parse_error_kind(const Bytes& file) {
  try {
    read_dataset(file);
  } catch (const ParseError& e) {
    return e.kind();
  }
  ADD_FAILURE() << "file parsed cleanly";
  return ParseErrorKind::NotFound;
}

}  // namespace

TEST(Writer, SignatureAndRawOnes) {
  DensityGrid g(2, 2, 2, 1.0);
  auto f = write_dataset(g, Precision::F64);
  const Bytes sig{0x89, 0x48, 0x44, 0x46, 0x0D, 0x0A, 0x1A, 0x0A};
  EXPECT_TRUE(std::equal(sig.begin(), sig.end(), f.bytes.begin()));
  ASSERT_EQ(f.bytes.size(), f.metadata_size + 64);
  for (std::size_t i = 0; i < 8; ++i) {
    EXPECT_EQ(load_le<std::uint64_t>(ByteSpan(f.bytes).subspan(f.metadata_size + 8 * i)),
              0x3FF0000000000000ull);
  }
}

TEST(Writer, RejectsEmptyGrid) {
  DensityGrid g;
  g.dims = {0, 1, 1};
  EXPECT_THROW(write_dataset(g, Precision::F64), ConfigError);
}

TEST(Writer, PlannedWritesRebuildTheFile) {
  auto f = write_dataset(DensityGrid(32, 32, 32, 1.0), Precision::F64);
  auto plan = plan_writes(f);
  EXPECT_EQ(plan.size(), 64u + 2u);
  Bytes out;
  for (const auto& w : plan) {
    out.resize(std::max<std::size_t>(out.size(), w.offset + w.data.size()));
    std::copy(w.data.begin(), w.data.end(), out.begin() + w.offset);
  }
  EXPECT_EQ(out, f.bytes);
  // The penultimate write carries all metadata with an undefined EOF.
  EXPECT_EQ(plan[64].data.size(), f.metadata_size);
  EXPECT_EQ(load_le<std::uint64_t>(ByteSpan(plan[64].data).subspan(40)), kUndefAddr);
}

TEST(Parser, RoundTripRandomGrids) {
  std::mt19937_64 rng(42);
  for (int t = 0; t < 200; ++t) {
    DensityGrid g = random_grid(rng, 16);
    const Precision p = t % 2 ? Precision::F32 : Precision::F64;
    if (p == Precision::F32) {
      for (double& c : g.cells) c = static_cast<float>(c);
    }
    auto f = write_dataset(g, p);
    auto m = parse_file(f.bytes);
    ASSERT_EQ(m.layout.address, m.metadata_size);
    ASSERT_TRUE(m.dtype.layout_consistent());
    ASSERT_EQ(m.dtype, FloatProperty::ieee(p));
    auto back = read_dataset(f.bytes, m);
    ASSERT_EQ(back.dims, g.dims);
    for (std::size_t i = 0; i < g.size(); ++i) {
      ASSERT_EQ(std::bit_cast<std::uint64_t>(back.cells[i]), std::bit_cast<std::uint64_t>(g.cells[i]));
    }
  }
}

TEST(Parser, DecodeMatchesNativeEncoding) {
  std::mt19937_64 rng(9);
  const auto f64 = FloatProperty::ieee(Precision::F64);
  const auto f32 = FloatProperty::ieee(Precision::F32);
  for (int t = 0; t < 100000; ++t) {
    const std::uint64_t w = rng();
    Bytes b(8);
    store_le(std::span(b), w, 8);
    const double d = std::bit_cast<double>(w);
    const double got = decode_float(f64, b);
    if (std::isnan(d)) {
      ASSERT_TRUE(std::isnan(got));
    } else {
      ASSERT_EQ(got, d) << std::hex << w;
    }
    const float f = std::bit_cast<float>(static_cast<std::uint32_t>(w));
    const double gotf = decode_float(f32, ByteSpan(b).first(4));
    if (std::isnan(f)) {
      ASSERT_TRUE(std::isnan(gotf));
    } else {
      ASSERT_EQ(gotf, static_cast<double>(f));
    }
  }
}

TEST(Parser, SymbolNodeSignatureCorruption) {
  auto f = fixtures::fixture_file();
  const std::uint64_t at = field_offset(f.bytes, "symbol_node.signature") + 2;
  f.bytes[at] ^= 1;
  try {
    parse_file(f.bytes);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.kind(), ParseErrorKind::BadSignature);
    EXPECT_EQ(e.offset(), at);
    EXPECT_EQ(e.field(), "symbol_node.signature");
  }
}

TEST(Parser, ObjectHeaderVersionCorruption) {
  auto f = fixtures::fixture_file();
  f.bytes[field_offset(f.bytes, "dataset_header.version")] ^= 1;
  EXPECT_EQ(parse_error_kind(f.bytes), ParseErrorKind::UnsupportedVersion);
}

TEST(Parser, TruncatedFile) {
  auto f = fixtures::fixture_file();
  f.bytes.resize(f.bytes.size() - 1);
  EXPECT_EQ(parse_error_kind(f.bytes), ParseErrorKind::AddressOutOfBounds);
  f.bytes.resize(50);
  EXPECT_EQ(parse_error_kind(f.bytes), ParseErrorKind::TruncatedMessage);
}

TEST(Parser, MessageCountMismatch) {
  auto f = fixtures::fixture_file();
  f.bytes[field_offset(f.bytes, "dataset_header.message_count")] ^= 1;
  EXPECT_EQ(parse_error_kind(f.bytes), ParseErrorKind::InvalidValue);
}

TEST(FieldMap, CoversMetadataExactly) {
  auto f = fixtures::fixture_file();
  auto m = parse_file(f.bytes);
  auto map = build_field_map(m);
  EXPECT_EQ(map.size, f.metadata_size);
  std::uint64_t cur = 0, total = 0;
  for (const auto& s : map.spans) {
    EXPECT_EQ(s.offset, cur) << s.name;
    EXPECT_GT(s.length, 0u);
    cur = s.end();
    total += s.length;
  }
  EXPECT_EQ(total, m.layout.address);
  const FieldSpan& bias = map.at(m.field("datatype.exponent_bias").offset);
  EXPECT_EQ(bias.name, "datatype.exponent_bias");
  EXPECT_EQ(bias.length, 4u);
  EXPECT_EQ(bias.role, FieldRole::FpProperty);
  EXPECT_GE(2 * map.bytes_with(FieldRole::Reserved), map.size);
}

TEST(Diagnose, Examples) {
  auto f = fixtures::fixture_file();
  auto m = parse_file(f.bytes);
  EXPECT_EQ(diagnose(m, {1.0}).kind, DiagnosisKind::Clean);
  auto d = diagnose(m, {4096.0});
  EXPECT_EQ(d.kind, DiagnosisKind::ExponentBiasFault);
  EXPECT_EQ(d.log2_scale, 12);
  EXPECT_EQ(diagnose(m, {1.7}).kind, DiagnosisKind::Unknown);

  Hdf5Model bad_loc = m;
  bad_loc.dtype.exponent_location = 53;
  EXPECT_EQ(diagnose(bad_loc, {1.04}).kind, DiagnosisKind::FpLayoutFault);

  // A wider exponent field reads positive data unchanged; the layout still
  // gives it away.
  Hdf5Model wide = m;
  wide.dtype.exponent_size = 12;
  EXPECT_EQ(diagnose(wide, {1.0}).kind, DiagnosisKind::FpLayoutFault);

  Hdf5Model shifted = m;
  shifted.layout.address += 64;
  EXPECT_EQ(diagnose(shifted, {1.0}).kind, DiagnosisKind::ArdFault);
}

TEST(Repair, ExponentBias) {
  auto p = FloatProperty::ieee(Precision::F32);
  p.exponent_bias = 0x73;
  EXPECT_EQ(correct_exponent_bias(p, 4096.0).exponent_bias, 0x7Fu);
  p.exponent_bias = 0x81;
  EXPECT_EQ(correct_exponent_bias(p, 0.25).exponent_bias, 0x7Fu);
  EXPECT_EQ(correct_exponent_bias(p, 1.0), p);
  EXPECT_THROW(correct_exponent_bias(p, 3.0), PreconditionError);
}

TEST(Repair, FpLayoutSingleField) {
  auto f32 = FloatProperty::ieee(Precision::F32);
  auto p = f32;
  p.mantissa_size = 21;
  EXPECT_EQ(correct_fp_layout(p, 32).mantissa_size, 23);
  p = f32;
  p.exponent_location = 25;
  EXPECT_EQ(correct_fp_layout(p, 32).exponent_location, 23);
  auto f64 = FloatProperty::ieee(Precision::F64);
  p = f64;
  p.exponent_size = 13;
  EXPECT_EQ(correct_fp_layout(p, 64).exponent_size, 11);
  p = f64;
  p.mantissa_location = 4;
  EXPECT_EQ(correct_fp_layout(p, 64), f64);
  p = f64;
  p.mantissa_size = 50;
  p.exponent_size = 9;
  EXPECT_THROW(correct_fp_layout(p, 64), Unrepairable);
  for (const auto& good : {f32, f64}) {
    EXPECT_EQ(correct_fp_layout(good, good.storage_bits()), good);
  }
}

TEST(Repair, ArdShiftRestoresData) {
  auto f = fixtures::fixture_file();
  const Bytes golden = f.bytes;
  auto m = parse_file(f.bytes);
  patch_ard(f.bytes, m, m.layout.address + 64);
  auto shifted = read_dataset(f.bytes);
  const auto orig = read_dataset(golden);
  for (std::size_t i = 0; i + 8 < orig.size(); ++i) ASSERT_EQ(shifted.cells[i], orig.cells[i + 8]);

  auto m2 = parse_file(f.bytes);
  EXPECT_EQ(diagnose(m2, {shifted.mean()}).kind, DiagnosisKind::ArdFault);
  EXPECT_EQ(correct_ard(m2).layout.address, m.metadata_size);
  auto report = auto_repair(f.bytes);
  EXPECT_TRUE(report.applied) << report.error;
  EXPECT_EQ(f.bytes, golden);
  EXPECT_EQ(correct_ard(m).layout.address, m.layout.address);
}

TEST(Repair, ExponentBiasScalesEveryValue) {
  auto f = fixtures::fixture_file();
  const auto orig = read_dataset(f.bytes);
  auto m = parse_file(f.bytes);
  for (int delta : {-12, -1, 1, 5}) {
    Bytes b = f.bytes;
    auto p = m.dtype;
    p.exponent_bias = static_cast<std::uint32_t>(static_cast<int>(p.exponent_bias) + delta);
    patch_datatype(b, m, p);
    auto g = read_dataset(b);
    for (std::size_t i = 0; i < g.size(); ++i) ASSERT_EQ(g.cells[i], std::ldexp(orig.cells[i], -delta));
    EXPECT_EQ(g.mean(), std::ldexp(1.0, -delta));
    auto report = auto_repair(b);
    EXPECT_TRUE(report.applied) << report.error;
    EXPECT_EQ(b, f.bytes);
  }
}

TEST(Repair, SingleFieldCorruptionsNeverDiagnoseClean) {
  auto f = fixtures::fixture_file();
  auto m = parse_file(f.bytes);
  struct Case {
    const char* field;
    int delta;
  };
  for (Case c : {Case{"datatype.exponent_bias", -12}, Case{"datatype.exponent_location", 1},
                 Case{"datatype.mantissa_location", 1}, Case{"datatype.mantissa_size", 1},
                 Case{"datatype.exponent_size", -1}, Case{"layout.address", 64}}) {
    Bytes b = f.bytes;
    const FieldSpan& s = m.field(c.field);
    const std::uint64_t v = load_le(ByteSpan(b).subspan(s.offset), s.length);
    store_le(std::span(b).subspan(s.offset), v + c.delta, s.length);
    auto mb = parse_file(b);
    const auto d = diagnose(mb, {read_dataset(b, mb).mean()});
    EXPECT_NE(d.kind, DiagnosisKind::Clean) << c.field;
    EXPECT_NE(d.kind, DiagnosisKind::Unknown) << c.field;
    auto report = auto_repair(b);
    EXPECT_TRUE(report.applied) << c.field << ": " << report.error;
    EXPECT_EQ(b, f.bytes) << c.field;
  }
}

TEST(Sweep, ClassesPartitionMetadata) {
  auto f = fixtures::fixture_file();
  auto map = build_field_map(parse_file(f.bytes));
  const auto params = fixtures::fixture_params();
  const auto golden = classify::analyze_file(f.bytes, params);
  ASSERT_GT(golden.halos.size(), 0u);
  auto fn = [&](ByteSpan b) { return classify::classify_toy(classify::analyze_file(b, params), golden.catalog); };
  auto recs = sweep_metadata(f.bytes, map, fn);
  ASSERT_EQ(recs.size(), map.size);
  for (std::size_t i = 0; i < recs.size(); ++i) {
    ASSERT_EQ(recs[i].offset, i);
    const auto role = recs[i].role;
    if (role == FieldRole::Reserved) {
      EXPECT_EQ(recs[i].outcome, OutcomeClass::Benign) << recs[i].field;
    }
    if (role == FieldRole::Signature || role == FieldRole::Version) {
      EXPECT_EQ(recs[i].outcome, OutcomeClass::Crash) << recs[i].field;
    }
  }
  SweepOptions per_bit;
  per_bit.per_bit = true;
  per_bit.threads = 2;
  auto bits = sweep_metadata(ByteSpan(f.bytes).first(200), map, fn, per_bit);
  EXPECT_EQ(bits.size(), 8u * 200u);
  EXPECT_EQ(bits[8 * 13 + 3].offset, 13u);
  EXPECT_EQ(bits[8 * 13 + 3].bit, 3u);
}
