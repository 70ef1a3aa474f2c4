// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "faultfs/common/process.hpp"
#include "faultfs/hdf5/parser.hpp"
#include "faultfs/hdf5/repair.hpp"
#include "helpers/fixtures.hpp"
#include "helpers/tempdir.hpp"
#include "helpers/toy_campaign.hpp"
#include "json.hpp"

using namespace faultfs;
using fixtures::slurp;
using fixtures::spit;
using fixtures::TempDir;
using nlohmann::json;

namespace {

struct Cli {
  ProcessResult result;
  std::string out;
  std::string err;
};

std::string text(const std::string& path) {
  const Bytes b = slurp(path);
  return std::string(b.begin(), b.end());
}

Cli faultfs_cli(const TempDir& dir, std::vector<std::string> args, std::map<std::string, std::string> env = {}) {
  ProcessSpec spec;
  spec.argv = {self_exe_dir() + "/faultfs"};
  spec.argv.insert(spec.argv.end(), args.begin(), args.end());
  spec.cwd = dir.path();
  spec.env = std::move(env);
  spec.stdout_path = dir / "cli.out";
  spec.stderr_path = dir / "cli.err";
  spec.timeout_s = 120;
  Cli c;
  c.result = run_process(spec);
  c.out = text(spec.stdout_path);
  c.err = text(spec.stderr_path);
  return c;
}

void write_json(const std::string& path, const json& j) {
  std::ofstream(path) << j.dump(2);
}

}  // namespace

TEST(Cli, InvalidConfigExitsTwoWithDiagnostics) {
  TempDir dir;
  auto doc = fixtures::toy_config_doc("DroppedWrite", 1, dir / "work");
  doc["fault"]["model"] = "Gremlin";
  write_json(dir / "bad.json", doc);
  const auto c = faultfs_cli(dir, {"campaign", dir / "bad.json"});
  EXPECT_EQ(c.result.exit_code, 2);
  EXPECT_NE(c.err.find("/fault/model"), std::string::npos) << c.err;
  EXPECT_FALSE(std::filesystem::exists(dir / "work"));

  EXPECT_EQ(faultfs_cli(dir, {"campaign", dir / "missing.json"}).result.exit_code, 2);
  EXPECT_EQ(faultfs_cli(dir, {"no-such-command"}).result.exit_code, 2);
}

TEST(Cli, RuntimeFailureExitsOne) {
  TempDir dir;
  spit(dir / "junk.h5", Bytes(100, 0x41));
  const auto c = faultfs_cli(dir, {"h5-inspect", dir / "junk.h5"});
  EXPECT_EQ(c.result.exit_code, 1);
  EXPECT_NE(c.err.find("signature"), std::string::npos) << c.err;
}

TEST(Cli, SmokeCampaignAndProfile) {
  TempDir dir;
  auto doc = fixtures::toy_config_doc("DroppedWrite", 10, "");
  doc.erase("workdir");
  doc["name"] = "smoke";
  write_json(dir / "smoke.json", doc);
  const std::map<std::string, std::string> env = {{"FAULTFS_WORKDIR", dir / "ws"}};

  const auto p = faultfs_cli(dir, {"profile", dir / "smoke.json"}, env);
  ASSERT_EQ(p.result.exit_code, 0) << p.err;
  EXPECT_NE(p.out.find("66 write calls"), std::string::npos) << p.out;

  const auto c = faultfs_cli(dir, {"campaign", dir / "smoke.json"}, env);
  ASSERT_EQ(c.result.exit_code, 0) << c.err;
  std::ifstream runs(dir / "ws/smoke/runs.ndjson");
  int lines = 0;
  for (std::string l; std::getline(runs, l);) ++lines;
  EXPECT_EQ(lines, 10);
  const auto result = json::parse(text(dir / "ws/smoke/result.json"));
  std::uint64_t sum = 0;
  for (const auto& [k, v] : result["classes"].items()) sum += v["count"].get<std::uint64_t>();
  EXPECT_EQ(sum, 10u);

  const auto again = faultfs_cli(dir, {"campaign", dir / "smoke.json", "--resume"}, env);
  EXPECT_EQ(again.result.exit_code, 0);
  EXPECT_EQ(json::parse(text(dir / "ws/smoke/result.json")), result);

  const auto one = faultfs_cli(dir, {"inject", dir / "smoke.json", "--index", "5"}, env);
  ASSERT_EQ(one.result.exit_code, 0) << one.err;
  const auto rec = json::parse(one.out);
  EXPECT_EQ(rec["target_index"], 5);
  EXPECT_EQ(rec["injected"]["index"], 5);
  EXPECT_EQ(faultfs_cli(dir, {"inject", dir / "smoke.json", "--index", "66"}, env).result.exit_code, 2);
}

TEST(Cli, H5FixRepairsShiftedAddress) {
  TempDir dir;
  auto f = fixtures::fixture_file();
  const Bytes golden = f.bytes;
  auto m = hdf5::parse_file(f.bytes);
  hdf5::patch_ard(f.bytes, m, m.layout.address + 64);
  spit(dir / "ard.h5", f.bytes);

  const auto dry = faultfs_cli(dir, {"h5-fix", "--dry-run", dir / "ard.h5"});
  EXPECT_EQ(dry.result.exit_code, 0) << dry.err;
  EXPECT_EQ(slurp(dir / "ard.h5"), f.bytes);

  const auto fix = faultfs_cli(dir, {"h5-fix", dir / "ard.h5"});
  ASSERT_EQ(fix.result.exit_code, 0) << fix.err;
  EXPECT_NE(fix.out.find("diagnosis: ArdFault"), std::string::npos) << fix.out;
  EXPECT_NE(fix.out.find("after repair: Clean"), std::string::npos) << fix.out;
  EXPECT_EQ(slurp(dir / "ard.h5"), golden);

  const auto clean = faultfs_cli(dir, {"h5-fix", dir / "ard.h5"});
  EXPECT_NE(clean.out.find("diagnosis: Clean"), std::string::npos) << clean.out;
}

TEST(Cli, InspectAndSweepCoverEveryMetadataByte) {
  TempDir dir;
  const auto f = fixtures::fixture_file();
  spit(dir / "f.h5", f.bytes);
  const auto ins = faultfs_cli(dir, {"h5-inspect", "--json", dir / "f.h5"});
  ASSERT_EQ(ins.result.exit_code, 0) << ins.err;
  const auto j = json::parse(ins.out);
  std::uint64_t covered = 0;
  for (const auto& s : j["fields"]) covered += s["length"].get<std::uint64_t>();
  EXPECT_EQ(covered, f.metadata_size);

  const auto sw = faultfs_cli(dir, {"h5-sweep", dir / "f.h5", "--csv", dir / "sweep.csv", "--threshold", "10",
                                    "--min-cells", "4"});
  ASSERT_EQ(sw.result.exit_code, 0) << sw.err;
  std::ifstream csv(dir / "sweep.csv");
  int rows = -1;
  for (std::string l; std::getline(csv, l);) ++rows;
  EXPECT_EQ(rows, static_cast<int>(f.metadata_size));
}

TEST(Cli, ReportMatchesClosedFormIntervals) {
  TempDir dir;
  // Two synthetic campaigns shaped like stacked-bar inputs.
  const std::vector<std::array<int, 4>> shapes = {{911, 81, 8, 0}, {857, 0, 141, 2}};
  std::vector<std::string> dirs;
  for (std::size_t c = 0; c < shapes.size(); ++c) {
    const std::string d = dir / ("c" + std::to_string(c));
    std::filesystem::create_directories(d);
    write_json(d + "/campaign.json", {{"name", "c" + std::to_string(c)}});
    std::ofstream runs(d + "/runs.ndjson");
    const char* names[] = {"benign", "detected", "sdc", "crash"};
    std::uint64_t id = 0;
    for (int k = 0; k < 4; ++k) {
      for (int i = 0; i < shapes[c][k]; ++i) {
        runs << json{{"run_id", id++}, {"attempt", 0}, {"rng_seed", 0}, {"target_index", 0}, {"fired", true},
                     {"class", names[k]}}
                    .dump()
             << "\n";
      }
    }
    dirs.push_back(d);
  }
  std::vector<std::string> args = {"report", "-o", dir / "rep"};
  args.insert(args.end(), dirs.begin(), dirs.end());
  const auto r = faultfs_cli(dir, args);
  ASSERT_EQ(r.result.exit_code, 0) << r.err;

  std::ifstream csv(dir / "rep/report.csv");
  std::string line;
  std::getline(csv, line);
  EXPECT_EQ(line, "campaign,class,count,rate,ci_lo,ci_hi");
  int checked = 0;
  const double z = 1.959963984540054;
  while (std::getline(csv, line)) {
    std::stringstream ss(line);
    std::string name, cls, f[4];
    std::getline(ss, name, ',');
    std::getline(ss, cls, ',');
    for (auto& x : f) std::getline(ss, x, ',');
    const double n = 1000, k = std::stod(f[0]), p = k / n;
    const double centre = (p + z * z / (2 * n)) / (1 + z * z / n);
    const double half = z / (1 + z * z / n) * std::sqrt(p * (1 - p) / n + z * z / (4 * n * n));
    EXPECT_NEAR(std::stod(f[1]), p, 1e-9);
    EXPECT_NEAR(std::stod(f[2]), std::max(0.0, centre - half), 1e-5) << line;
    EXPECT_NEAR(std::stod(f[3]), std::min(1.0, centre + half), 1e-5) << line;
    ++checked;
  }
  EXPECT_EQ(checked, 8);
  std::ifstream stacked(dir / "rep/stacked.csv");
  std::getline(stacked, line);
  EXPECT_EQ(line, "campaign,n_runs,benign_pct,detected_pct,sdc_pct,crash_pct");
  std::getline(stacked, line);
  EXPECT_EQ(line.rfind("c0,1000,91.1", 0), 0u) << line;
}

TEST(Cli, SeedOverrideChangesTargets) {
  TempDir dir;
  write_json(dir / "c.json", fixtures::toy_config_doc("BitFlip", 1, dir / "w"));
  const auto a = faultfs_cli(dir, {"inject", dir / "c.json", "--seed", "1"});
  const auto b = faultfs_cli(dir, {"inject", dir / "c.json", "--seed", "2"});
  ASSERT_EQ(a.result.exit_code, 0) << a.err;
  ASSERT_EQ(b.result.exit_code, 0) << b.err;
  EXPECT_NE(json::parse(a.out)["rng_seed"], json::parse(b.out)["rng_seed"]);
  EXPECT_EQ(json::parse(a.out)["rng_seed"], json::parse(faultfs_cli(dir, {"inject", dir / "c.json", "--seed", "1"}).out)["rng_seed"]);
}
