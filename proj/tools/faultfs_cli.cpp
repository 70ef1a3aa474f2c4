// SPDX-License-Identifier: Apache-2.0
//
// faultfs: profile / inject / campaign over a workload config, HDF5
// metadata inspection, sweep and repair, and result reports.
// Exit codes: 0 success, 1 runtime failure, 2 invalid config or usage.

#include <signal.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <iterator>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "faultfs/campaign/campaign.hpp"
#include "faultfs/campaign/config.hpp"
#include "faultfs/classify/toy.hpp"
#include "faultfs/common/error.hpp"
#include "faultfs/hdf5/field_map.hpp"
#include "faultfs/hdf5/parser.hpp"
#include "faultfs/hdf5/repair.hpp"
#include "faultfs/hdf5/sweep.hpp"
#include "faultfs/interpose/fuse_adapter.hpp"
#include "faultfs/interpose/session.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using namespace faultfs;
using nlohmann::json;
using nlohmann::ordered_json;

namespace {

struct ConfigArgs {
  std::string path;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> n_runs;
  std::optional<std::uint32_t> parallelism;
  std::string workdir;
};

void add_config_args(CLI::App* cmd, ConfigArgs& a) {
  cmd->add_option("config", a.path, "Campaign config (JSON)")->required();
  cmd->add_option("--seed", a.seed, "Override the config seed");
  cmd->add_option("--workdir", a.workdir, "Override the campaign workspace");
}

campaign::CampaignConfig load(const ConfigArgs& a) {
  auto c = campaign::load_config(a.path);
  if (a.seed) c.seed = *a.seed;
  if (a.n_runs) c.n_runs = *a.n_runs;
  if (a.parallelism) c.parallelism = *a.parallelism;
  if (!a.workdir.empty()) c.workdir = fs::absolute(a.workdir).string();
  return c;
}

Bytes read_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SetupError("cannot read " + path);
  return Bytes(std::istreambuf_iterator<char>(in), {});
}

void write_bytes(const std::string& path, const Bytes& b) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out.write(reinterpret_cast<const char*>(b.data()), static_cast<std::streamsize>(b.size()));
  if (!out) throw SetupError("cannot write " + path);
}

void print_result(const campaign::CampaignResult& r) {
  std::printf("%-10s %8s %8s %17s\n", "class", "count", "rate", "95% CI");
  for (const auto& s : r.classes) {
    std::printf("%-10s %8llu %7.2f%% [%6.2f%%, %6.2f%%]\n", std::string(to_string(s.outcome)).c_str(),
                static_cast<unsigned long long>(s.count), 100 * s.rate, 100 * s.ci.lo, 100 * s.ci.hi);
  }
  std::printf("runs %llu, no-fire attempts %llu\n", static_cast<unsigned long long>(r.n_runs),
              static_cast<unsigned long long>(r.nofire_attempts));
}

int cmd_profile(const ConfigArgs& a) {
  auto c = load(a);
  fs::create_directories(c.workdir);
  const auto g = campaign::profile(c);
  std::printf("%s: %llu %s calls in %.3f s\n", c.name.c_str(), static_cast<unsigned long long>(g.count),
              std::string(interpose::to_string(c.fault.primitive)).c_str(), g.seconds);
  std::cout << g.to_json().dump(2) << "\n";
  return 0;
}

int cmd_inject(const ConfigArgs& a, std::optional<std::uint64_t> index, std::uint64_t run_id) {
  auto c = load(a);
  fs::create_directories(c.workdir);
  auto g = campaign::load_profile(c);
  if (!g) g = campaign::profile(c);
  const auto sig = campaign::generate_signature(c, run_id);
  const std::uint64_t idx = index ? *index : campaign::target_for(sig, g->count, 0);
  if (idx >= g->count) {
    throw ConfigError("--index " + std::to_string(idx) + " is past the profiled count " + std::to_string(g->count));
  }
  const auto r = campaign::run_one(c, *g, sig, idx, run_id);
  std::cout << r.to_json().dump(2) << "\n";
  if (!r.fired) std::fprintf(stderr, "faultfs: the fault at index %llu never fired\n", static_cast<unsigned long long>(idx));
  return 0;
}

int cmd_campaign(const ConfigArgs& a, bool resume, bool quiet) {
  auto c = load(a);
  const auto r = campaign::run_campaign(c, resume, [&](const campaign::RunRecord& rec, std::uint64_t done,
                                                       std::uint64_t total) {
    if (quiet) return;
    std::fprintf(stderr, "[%llu/%llu] run %llu index %llu -> %s\n", static_cast<unsigned long long>(done),
                 static_cast<unsigned long long>(total), static_cast<unsigned long long>(rec.run_id),
                 static_cast<unsigned long long>(rec.target_index), std::string(to_string(rec.outcome)).c_str());
  });
  print_result(r);
  std::printf("results in %s\n", c.workdir.c_str());
  return 0;
}

int cmd_h5_inspect(const std::string& path, bool as_json) {
  const Bytes file = read_bytes(path);
  const auto model = hdf5::parse_file(file);
  const auto map = hdf5::build_field_map(model);
  if (as_json) {
    ordered_json j;
    j["metadata_size"] = model.metadata_size;
    j["raw_data_address"] = model.layout.address;
    j["dims"] = model.dims;
    ordered_json spans = ordered_json::array();
    for (const auto& s : map.spans) {
      spans.push_back({{"offset", s.offset}, {"length", s.length}, {"role", std::string(hdf5::to_string(s.role))},
                       {"field", s.name}});
    }
    j["fields"] = spans;
    std::cout << j.dump(2) << "\n";
    return 0;
  }
  std::printf("%s: %llu bytes, metadata %llu, raw data at %llu, dims", path.c_str(),
              static_cast<unsigned long long>(model.file_size), static_cast<unsigned long long>(model.metadata_size),
              static_cast<unsigned long long>(model.layout.address));
  for (auto d : model.dims) std::printf(" %llu", static_cast<unsigned long long>(d));
  const auto& t = model.dtype;
  std::printf("\nfloat: size %u, sign %u, exponent %u+%u bias 0x%X, mantissa %u+%u\n", t.size, t.sign_location,
              t.exponent_location, t.exponent_size, t.exponent_bias, t.mantissa_location, t.mantissa_size);
  std::printf("%8s %6s  %-12s %s\n", "offset", "length", "role", "field");
  for (const auto& s : map.spans) {
    std::printf("%8llu %6llu  %-12s %s\n", static_cast<unsigned long long>(s.offset),
                static_cast<unsigned long long>(s.length), std::string(hdf5::to_string(s.role)).c_str(),
                s.name.c_str());
  }
  return 0;
}

int cmd_h5_sweep(const std::string& path, const classify::AnalysisParams& params, bool per_bit, unsigned threads,
                 const std::string& csv) {
  const Bytes file = read_bytes(path);
  const auto model = hdf5::parse_file(file);
  const auto golden = classify::analyze_file(file, params);
  hdf5::SweepOptions opts;
  opts.per_bit = per_bit;
  opts.threads = threads;
  const auto records = hdf5::sweep_metadata(
      file, hdf5::build_field_map(model),
      [&](ByteSpan corrupted) { return classify::classify_toy(classify::analyze_file(corrupted, params), golden.catalog); },
      opts);
  if (!csv.empty()) {
    std::ofstream out(csv, std::ios::trunc);
    hdf5::write_sweep_csv(out, records);
    if (!out) throw SetupError("cannot write " + csv);
  }
  hdf5::write_sweep_summary(std::cout, records);
  return 0;
}

int cmd_h5_fix(const std::string& path, bool dry_run, const std::string& out_path) {
  Bytes file = read_bytes(path);
  const auto rep = hdf5::auto_repair(file);
  std::printf("diagnosis: %s", std::string(hdf5::to_string(rep.before.kind)).c_str());
  if (rep.before.kind == hdf5::DiagnosisKind::ExponentBiasFault) std::printf(" (scale 2^%d)", rep.before.log2_scale);
  std::printf("\naverage: %.17g\n", rep.average_before);
  if (!rep.error.empty()) std::printf("note: %s\n", rep.error.c_str());
  for (const auto& ch : rep.changes) std::printf("repair: %s\n", ch.c_str());
  if (rep.after) {
    std::printf("after repair: %s, average %.17g\n", std::string(hdf5::to_string(rep.after->kind)).c_str(),
                rep.average_after);
  }
  if (rep.applied && !dry_run) {
    const std::string target = out_path.empty() ? path : out_path;
    write_bytes(target, file);
    std::printf("wrote %s\n", target.c_str());
  } else if (rep.applied) {
    std::printf("dry run: file left unchanged\n");
  }
  if (rep.before.kind == hdf5::DiagnosisKind::Clean) return 0;
  return rep.applied ? 0 : 1;
}

int cmd_report(const std::vector<std::string>& dirs, const std::string& out_dir) {
  std::vector<campaign::CampaignResult> results;
  json all = json::array();
  for (const auto& d : dirs) {
    std::string name = fs::path(d).lexically_normal().filename().string();
    std::ifstream cj(fs::path(d) / "campaign.json");
    if (cj) {
      const auto j = json::parse(cj, nullptr, false);
      if (j.is_object() && j.contains("name")) name = j["name"].get<std::string>();
    }
    const auto runs_path = fs::path(d) / "runs.ndjson";
    if (!fs::exists(runs_path)) throw SetupError("no run records in " + d);
    auto r = campaign::aggregate(name, campaign::read_run_records(runs_path.string()));
    std::printf("== %s\n", name.c_str());
    print_result(r);
    all.push_back(r.to_json());
    results.push_back(std::move(r));
  }
  fs::create_directories(out_dir);
  {
    std::ofstream out(fs::path(out_dir) / "report.json", std::ios::trunc);
    out << all.dump(2) << "\n";
  }
  {
    std::ofstream out(fs::path(out_dir) / "report.csv", std::ios::trunc);
    out << "campaign,class,count,rate,ci_lo,ci_hi\n";
    for (const auto& r : results) {
      for (const auto& s : r.classes) {
        out << r.name << ',' << to_string(s.outcome) << ',' << s.count << ',' << s.rate << ',' << s.ci.lo << ','
            << s.ci.hi << '\n';
      }
    }
  }
  campaign::write_stacked_csv(results, (fs::path(out_dir) / "stacked.csv").string());
  std::printf("wrote report.json, report.csv, stacked.csv under %s\n", out_dir.c_str());
  return 0;
}

int cmd_mount(const std::string& root, const std::string& mountpoint, const std::string& log) {
  std::string why;
  if (!interpose::FuseMount::available(&why)) throw SetupError("FUSE unavailable: " + why);
  sigset_t set;
  sigemptyset(&set);
  sigaddset(&set, SIGINT);
  sigaddset(&set, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &set, nullptr);
  interpose::Session session(fs::absolute(root).string(), nullptr, log);
  interpose::FuseMount mount(session, fs::absolute(mountpoint).string());
  std::fprintf(stderr, "faultfs: %s mounted on %s; interrupt to unmount\n", root.c_str(), mountpoint.c_str());
  int sig = 0;
  sigwait(&set, &sig);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"File-system-level fault injection and HDF5 metadata tooling"};
  app.require_subcommand(1);
  app.fallthrough();
  int verbosity = 0;
  app.add_flag("-v,--verbose", verbosity, "More output");

  ConfigArgs pa, ia, ca;
  auto* profile = app.add_subcommand("profile", "Run the workload fault-free and count primitive calls");
  add_config_args(profile, pa);

  auto* inject = app.add_subcommand("inject", "Run the workload once with one fault");
  add_config_args(inject, ia);
  std::optional<std::uint64_t> index;
  std::uint64_t run_id = 0;
  inject->add_option("--index", index, "Target call index (default: sampled)");
  inject->add_option("--run-id", run_id, "Run id used to derive the fault signature");

  auto* camp = app.add_subcommand("campaign", "Run a full fault-injection campaign");
  add_config_args(camp, ca);
  bool resume = false;
  camp->add_flag("--resume", resume, "Keep completed runs from an interrupted campaign");
  camp->add_option("--n-runs", ca.n_runs, "Override the number of runs")->check(CLI::PositiveNumber);
  camp->add_option("--parallelism", ca.parallelism, "Concurrent runs")->check(CLI::PositiveNumber);

  std::string h5_path;
  bool as_json = false;
  auto* inspect = app.add_subcommand("h5-inspect", "List the metadata fields of an HDF5 file");
  inspect->add_option("file", h5_path)->required();
  inspect->add_flag("--json", as_json);

  classify::AnalysisParams params;
  bool per_bit = false;
  unsigned threads = 1;
  std::string csv;
  auto* sweep = app.add_subcommand("h5-sweep", "Flip every metadata byte and classify the toy analysis");
  sweep->add_option("file", h5_path)->required();
  sweep->add_flag("--per-bit", per_bit, "All 8 bits of each byte instead of bit 0");
  sweep->add_option("--threads", threads)->check(CLI::PositiveNumber);
  sweep->add_option("--csv", csv, "Per-injection CSV output");
  sweep->add_option("--threshold", params.threshold);
  sweep->add_option("--min-cells", params.min_cells);

  bool dry_run = false;
  std::string fix_out;
  auto* fix = app.add_subcommand("h5-fix", "Diagnose and repair floating-point and address metadata");
  fix->add_option("file", h5_path)->required();
  fix->add_flag("--dry-run", dry_run, "Diagnose only");
  fix->add_option("-o,--out", fix_out, "Write the repaired file here instead of in place");

  std::vector<std::string> dirs;
  std::string report_out = ".";
  auto* report = app.add_subcommand("report", "Aggregate campaign directories into CSV/JSON");
  report->add_option("dirs", dirs, "Campaign workdirs")->required();
  report->add_option("-o,--out", report_out, "Output directory");

  std::string mount_root, mountpoint, mount_log;
  auto* mount = app.add_subcommand("mount", "Serve a passthrough FUSE mount until interrupted");
  mount->add_option("root", mount_root)->required();
  mount->add_option("mountpoint", mountpoint)->required();
  mount->add_option("--log", mount_log, "Record file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (*profile) return cmd_profile(pa);
    if (*inject) return cmd_inject(ia, index, run_id);
    if (*camp) return cmd_campaign(ca, resume, verbosity == 0);
    if (*inspect) return cmd_h5_inspect(h5_path, as_json);
    if (*sweep) return cmd_h5_sweep(h5_path, params, per_bit, threads, csv);
    if (*fix) return cmd_h5_fix(h5_path, dry_run, fix_out);
    if (*report) return cmd_report(dirs, report_out);
    if (*mount) return cmd_mount(mount_root, mountpoint, mount_log);
  } catch (const campaign::SchemaError& e) {
    std::fprintf(stderr, "faultfs: invalid config\n");
    for (const auto& d : e.diagnostics()) std::fprintf(stderr, "  %s\n", d.c_str());
    return 2;
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "faultfs: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "faultfs: %s\n", e.what());
    return 1;
  }
  return 2;
}
