// SPDX-License-Identifier: Apache-2.0
#include "faultfs/campaign/campaign.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <map>
#include <memory>
#include <mutex>
#include <set>
#include <thread>

#include "faultfs/common/error.hpp"
#include "faultfs/common/process.hpp"
#include "faultfs/interpose/controller.hpp"
#include "faultfs/interpose/fuse_adapter.hpp"
#include "faultfs/interpose/session.hpp"

namespace faultfs::campaign {

using nlohmann::json;
using nlohmann::ordered_json;
namespace fs = std::filesystem;

namespace {

constexpr const char* kRunsFile = "runs.ndjson";
constexpr const char* kProfileFile = "profile.json";
constexpr const char* kCampaignFile = "campaign.json";

std::string replace_all(std::string s, const std::string& from, const std::string& to) {
  for (std::size_t pos = 0; (pos = s.find(from, pos)) != std::string::npos; pos += to.size()) {
    s.replace(pos, from.size(), to);
  }
  return s;
}

struct Placeholders {
  std::string root;
  std::string run_id;
};

Argv expand(const Argv& argv, const CampaignConfig& c, const Placeholders& ph) {
  static const std::string bin = self_exe_dir();
  Argv out;
  for (std::string a : argv) {
    a = replace_all(a, "{root}", ph.root);
    a = replace_all(a, "{bin}", bin);
    a = replace_all(a, "{config_dir}", c.config_dir);
    a = replace_all(a, "{run_id}", ph.run_id);
    out.push_back(std::move(a));
  }
  return out;
}

std::optional<Bytes> read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) return std::nullopt;
  return Bytes(std::istreambuf_iterator<char>(in), {});
}

struct Workspace {
  fs::path dir;
  fs::path root;
  fs::path control;
  fs::path log;
};

Workspace fresh_workspace(const fs::path& dir, const CampaignConfig& c) {
  Workspace ws{dir, dir / "root", dir / "control", dir / "session.ndjson"};
  std::error_code ec;
  fs::remove_all(dir, ec);
  fs::create_directories(ws.root);
  for (const auto& in : c.workload.inputs) {
    fs::copy(in, ws.root / fs::path(in).filename(), fs::copy_options::recursive, ec);
    if (ec) throw SetupError("cannot copy input " + in + ": " + ec.message());
  }
  return ws;
}

struct Execution {
  ProcessResult result;  ///< first failing step, or the last one
  double seconds = 0;
  bool workload_ok = false;
};

Execution run_steps(const CampaignConfig& c, const Workspace& ws, const std::string& run_id,
                    double timeout_s) {
  Execution ex;
  const auto t0 = std::chrono::steady_clock::now();
  auto remaining = [&] {
    if (timeout_s <= 0) return 0.0;
    const double used = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return std::max(0.001, timeout_s - used);
  };

  auto run_list = [&](const std::vector<Argv>& steps, const std::string& visible_root,
                      const std::map<std::string, std::string>& extra_env, const std::string& tag) {
    for (std::size_t i = 0; i < steps.size(); ++i) {
      ProcessSpec spec;
      spec.argv = expand(steps[i], c, {visible_root, run_id});
      spec.cwd = visible_root;
      spec.env = c.workload.env;
      for (const auto& [k, v] : extra_env) spec.env[k] = v;
      spec.unset_env = {"LD_PRELOAD", "FAULTFS_ROOT", "FAULTFS_CONTROL", "FAULTFS_LOG"};
      spec.stdout_path = (ws.dir / (tag + std::to_string(i) + ".out")).string();
      spec.stderr_path = (ws.dir / (tag + std::to_string(i) + ".err")).string();
      spec.timeout_s = remaining();
      ex.result = run_process(spec);
      if (!ex.result.ok()) return false;
    }
    return true;
  };

  if (c.interpose == InterposeMode::Preload) {
    const std::map<std::string, std::string> env = {
        {"LD_PRELOAD", self_exe_dir() + "/libfaultfs_preload.so"},
        {"FAULTFS_ROOT", ws.root.string()},
        {"FAULTFS_CONTROL", ws.control.string()},
        {"FAULTFS_LOG", ws.log.string()}};
    ex.workload_ok = run_list(c.workload.steps, ws.root.string(), env, "step");
  } else {
    auto controller = interpose::InjectionController::open_shared(ws.control.string(), false);
    interpose::Session session(ws.root.string(), &controller, ws.log.string());
    const fs::path mnt = ws.dir / "mnt";
    fs::create_directories(mnt);
    {
      interpose::FuseMount mount(session, mnt.string());
      ex.workload_ok = run_list(c.workload.steps, mnt.string(), {}, "step");
    }
  }
  if (ex.workload_ok) run_list(c.workload.analysis, ws.root.string(), {}, "analysis");
  ex.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return ex;
}

std::set<std::string> output_names(const CampaignConfig& c) {
  std::set<std::string> names(c.policy.compared_outputs.begin(), c.policy.compared_outputs.end());
  names.insert(c.policy.required_outputs.begin(), c.policy.required_outputs.end());
  if (!c.policy.stat_file.empty()) names.insert(c.policy.stat_file);
  return names;
}

std::string run_dir_name(std::uint64_t run_id) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%06llu", static_cast<unsigned long long>(run_id));
  return buf;
}

json counts_json(const std::array<std::uint64_t, interpose::kPrimitiveCount>& counts) {
  json j = json::object();
  for (std::size_t i = 0; i < counts.size(); ++i) {
    if (counts[i]) j[std::string(interpose::kPrimitiveNames[i])] = counts[i];
  }
  return j;
}

std::optional<bool> read_suspect(const Bytes& summary, const std::string& key) {
  const auto doc = json::parse(summary.begin(), summary.end(), nullptr, false);
  if (!doc.is_object() || !doc.contains(key)) return std::nullopt;
  const json& v = doc[key];
  if (v.is_boolean()) return v.get<bool>();
  if (v.is_string()) {
    std::string t = v.get<std::string>();
    for (auto& ch : t) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    return t == "suspect";
  }
  return std::nullopt;
}

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::trunc);
  out << text;
  if (!out) throw SetupError("cannot write " + p.string());
}

}  // namespace

json Golden::to_json() const {
  json outs = json::object();
  for (const auto& [name, bytes] : outputs) {
    char hex[17];
    std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(fnv1a64(bytes)));
    outs[name] = {{"size", bytes.size()}, {"fnv1a64", hex}};
  }
  return {{"count", count}, {"counts", counts_json(counts)}, {"seconds", seconds}, {"outputs", outs}};
}

Golden profile(const CampaignConfig& c) {
  const fs::path dir = fs::path(c.workdir) / "golden";
  Workspace ws = fresh_workspace(dir, c);
  {
    // Unarmed shared block: counts only.
    interpose::InjectionController::open_shared(ws.control.string(), true);
  }
  const Execution ex = run_steps(c, ws, "golden", 0);
  if (!ex.workload_ok || !ex.result.ok()) {
    throw CampaignError("golden run failed (exit " + std::to_string(ex.result.exit_code) + ", signal " +
                        std::to_string(ex.result.term_signal) + "); see " + ws.dir.string());
  }
  auto controller = interpose::InjectionController::open_shared(ws.control.string(), false);
  Golden g;
  g.counts = controller.counts();
  g.count = controller.count(c.fault.primitive);
  g.seconds = ex.seconds;
  for (const auto& name : output_names(c)) {
    auto bytes = read_file(ws.root / name);
    if (!bytes) throw CampaignError("golden run did not produce " + name);
    g.outputs[name] = std::move(*bytes);
  }
  write_text(fs::path(c.workdir) / kProfileFile, g.to_json().dump(2) + "\n");
  return g;
}

std::optional<Golden> load_profile(const CampaignConfig& c) {
  const auto text = read_file(fs::path(c.workdir) / kProfileFile);
  if (!text) return std::nullopt;
  const auto j = json::parse(text->begin(), text->end(), nullptr, false);
  if (!j.is_object()) return std::nullopt;
  Golden g;
  g.count = j.value("count", 0ull);
  g.seconds = j.value("seconds", 0.0);
  const json counts = j.value("counts", json::object());
  for (const auto& [name, v] : counts.items()) {
    if (auto p = interpose::parse_primitive(name)) g.counts[static_cast<std::size_t>(*p)] = v.get<std::uint64_t>();
  }
  for (const auto& name : output_names(c)) {
    auto bytes = read_file(fs::path(c.workdir) / "golden" / "root" / name);
    if (!bytes) return std::nullopt;
    g.outputs[name] = std::move(*bytes);
  }
  return g;
}

interpose::FaultSignature generate_signature(const CampaignConfig& c, std::uint64_t run_id) {
  interpose::FaultSignature s = c.fault;
  s.rng_seed = mix_seed(c.seed, run_id);
  s.validate();
  return s;
}

std::uint64_t pick_target(std::uint64_t count, Rng& rng) {
  if (count == 0) throw CampaignError("target primitive never invoked");
  return uniform_index(rng, count);
}

std::uint64_t target_for(const interpose::FaultSignature& sig, std::uint64_t count, std::uint32_t attempt) {
  Rng rng(mix_seed(sig.rng_seed, 0x7461726765740000ULL + attempt));
  return pick_target(count, rng);
}

json RunRecord::to_json() const {
  ordered_json j;
  j["run_id"] = run_id;
  j["attempt"] = attempt;
  j["rng_seed"] = rng_seed;
  j["target_index"] = target_index;
  j["fired"] = fired;
  j["class"] = std::string(to_string(outcome));
  j["exit_code"] = exit_code;
  j["term_signal"] = term_signal;
  j["timed_out"] = timed_out;
  j["seconds"] = seconds;
  j["summary_stat"] = summary_stat ? json(*summary_stat) : json(nullptr);
  j["suspect"] = suspect ? json(*suspect) : json(nullptr);
  j["stats"] = stats;
  j["injected"] = injected ? json::parse(injected->to_json_line()) : json(nullptr);
  j["injected_records"] = injected_records;
  j["artifacts"] = artifacts;
  return j;
}

RunRecord RunRecord::from_json(const json& j) {
  RunRecord r;
  r.run_id = j.at("run_id").get<std::uint64_t>();
  r.attempt = j.at("attempt").get<std::uint32_t>();
  r.rng_seed = j.at("rng_seed").get<std::uint64_t>();
  r.target_index = j.at("target_index").get<std::uint64_t>();
  r.fired = j.at("fired").get<bool>();
  const auto cls = parse_outcome(j.at("class").get<std::string>());
  if (!cls) throw std::invalid_argument("unknown class in run record");
  r.outcome = *cls;
  r.exit_code = j.value("exit_code", 0);
  r.term_signal = j.value("term_signal", 0);
  r.timed_out = j.value("timed_out", false);
  r.seconds = j.value("seconds", 0.0);
  if (j.contains("summary_stat") && j["summary_stat"].is_number()) r.summary_stat = j["summary_stat"].get<double>();
  if (j.contains("suspect") && j["suspect"].is_boolean()) r.suspect = j["suspect"].get<bool>();
  r.stats = j.value("stats", json::object());
  if (j.contains("injected") && j["injected"].is_object()) {
    r.injected = interpose::LogRecord::from_json_line(j["injected"].dump());
  }
  r.injected_records = j.value("injected_records", 0ull);
  r.artifacts = j.value("artifacts", std::string());
  return r;
}

RunRecord run_one(const CampaignConfig& c, const Golden& golden, const interpose::FaultSignature& sig,
                  std::optional<std::uint64_t> index, std::uint64_t run_id, std::uint32_t attempt) {
  const std::string rel = (fs::path("runs") / run_dir_name(run_id)).string();
  Workspace ws = fresh_workspace(fs::path(c.workdir) / rel, c);
  {
    auto controller = interpose::InjectionController::open_shared(ws.control.string(), true);
    if (index) controller.arm(sig, *index);
  }
  const double timeout = std::max(c.policy.timeout_factor * golden.seconds, c.min_timeout_s);
  const Execution ex = run_steps(c, ws, std::to_string(run_id), timeout);

  RunRecord r;
  r.run_id = run_id;
  r.attempt = attempt;
  r.rng_seed = sig.rng_seed;
  r.target_index = index.value_or(0);
  r.artifacts = rel;
  r.seconds = ex.seconds;
  r.exit_code = ex.result.exit_code;
  r.term_signal = ex.result.term_signal;
  r.timed_out = ex.result.timed_out;
  {
    auto controller = interpose::InjectionController::open_shared(ws.control.string(), false);
    r.fired = controller.fired();
  }
  if (fs::exists(ws.log)) {
    for (auto& rec : interpose::SessionLog::read(ws.log.string())) {
      if (!rec.injected) continue;
      ++r.injected_records;
      r.injected = std::move(rec);
    }
  }

  classify::RunOutcome out;
  out.exit_code = ex.result.exit_code;
  out.term_signal = ex.result.term_signal;
  out.timed_out = ex.result.timed_out;
  for (const auto& name : output_names(c)) out.outputs[name] = read_file(ws.root / name);
  if (!c.policy.stat_file.empty()) {
    if (const auto& s = out.outputs[c.policy.stat_file]) {
      out.summary_stat = classify::extract_stat(*s, c.policy.stat_key);
      if (!c.suspect_key.empty()) out.suspect = read_suspect(*s, c.suspect_key);
      const auto doc = json::parse(s->begin(), s->end(), nullptr, false);
      for (const auto& k : c.record_keys) {
        if (doc.is_object() && doc.contains(k)) r.stats[k] = doc[k];
      }
    }
  }
  r.summary_stat = out.summary_stat;
  r.suspect = out.suspect;
  r.outcome = classify::classify_run(out, golden.outputs, c.policy);

  if (!c.keep_artifacts) {
    std::error_code ec;
    fs::remove_all(ws.root, ec);
    fs::remove_all(ws.dir / "mnt", ec);
  }
  return r;
}

CampaignResult aggregate(const std::string& name, std::vector<RunRecord> runs, double level) {
  CampaignResult res;
  res.name = name;
  std::sort(runs.begin(), runs.end(), [](const RunRecord& a, const RunRecord& b) { return a.run_id < b.run_id; });
  for (const auto& r : runs) {
    res.nofire_attempts += r.attempt;
    if (!r.fired) continue;
    ++res.n_runs;
    ++res.classes[static_cast<std::size_t>(r.outcome)].count;
  }
  for (OutcomeClass c : kAllOutcomes) {
    auto& s = res.classes[static_cast<std::size_t>(c)];
    s.outcome = c;
    if (res.n_runs > 0) {
      s.rate = static_cast<double>(s.count) / static_cast<double>(res.n_runs);
      s.ci = wilson_interval(s.count, res.n_runs, level);
    }
  }
  res.runs = std::move(runs);
  return res;
}

json CampaignResult::to_json() const {
  ordered_json j;
  j["name"] = name;
  j["n_runs"] = n_runs;
  j["nofire_attempts"] = nofire_attempts;
  ordered_json cls = ordered_json::object();
  for (const auto& s : classes) {
    cls[std::string(to_string(s.outcome))] = {
        {"count", s.count}, {"rate", s.rate}, {"ci_lo", s.ci.lo}, {"ci_hi", s.ci.hi}};
  }
  j["classes"] = cls;
  j["confidence_level"] = 0.95;
  j["ci_method"] = "wilson";
  return j;
}

std::vector<RunRecord> read_run_records(const std::string& path) {
  std::vector<RunRecord> out;
  std::ifstream in(path);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto j = json::parse(line, nullptr, false);
    if (j.is_discarded()) continue;
    try {
      out.push_back(RunRecord::from_json(j));
    } catch (const std::exception&) {
    }
  }
  return out;
}

CampaignResult run_campaign(const CampaignConfig& c, bool resume, const ProgressFn& progress) {
  const fs::path work(c.workdir);
  const fs::path runs_path = work / kRunsFile;
  const json identity = config_to_json(c);

  std::map<std::uint64_t, RunRecord> done;
  std::optional<Golden> golden;
  if (resume && fs::exists(work / kCampaignFile)) {
    const auto stored = read_file(work / kCampaignFile);
    const auto j = json::parse(stored->begin(), stored->end(), nullptr, false);
    if (j.is_discarded() || j != identity) {
      throw ConfigError("cannot resume: " + (work / kCampaignFile).string() + " was written by a different config");
    }
    for (auto& r : read_run_records(runs_path.string())) {
      if (r.fired && r.run_id < c.n_runs) done[r.run_id] = std::move(r);
    }
    golden = load_profile(c);
  } else if (fs::exists(work)) {
    // Only ever wipe a directory a previous campaign created.
    if (!fs::is_empty(work) && !fs::exists(work / kCampaignFile) && !fs::exists(work / kProfileFile)) {
      throw ConfigError("workdir " + work.string() + " exists and is not a campaign directory");
    }
    std::error_code ec;
    fs::remove_all(work, ec);
  }
  fs::create_directories(work);
  write_text(work / kCampaignFile, identity.dump(2) + "\n");
  if (!golden) golden = profile(c);
  if (golden->count == 0) throw CampaignError("target primitive never invoked");

  // Rewrite the kept records so that a torn final line is not extended.
  {
    std::ofstream out(runs_path, std::ios::trunc);
    for (const auto& [id, r] : done) out << r.to_json().dump() << "\n";
  }

  std::vector<std::uint64_t> todo;
  for (std::uint64_t id = 0; id < c.n_runs; ++id) {
    if (!done.count(id)) todo.push_back(id);
  }

  std::mutex mu;
  std::ofstream out(runs_path, std::ios::app);
  std::atomic<std::size_t> next{0};
  std::atomic<std::uint64_t> nofire{0};
  std::uint64_t finished = done.size();
  for (const auto& [id, r] : done) nofire += r.attempt;
  std::exception_ptr failure;
  std::atomic<bool> stop{false};

  auto worker = [&] {
    while (!stop) {
      const std::size_t k = next++;
      if (k >= todo.size()) return;
      const std::uint64_t id = todo[k];
      try {
        const auto sig = generate_signature(c, id);
        std::optional<RunRecord> rec;
        for (std::uint32_t attempt = 0; attempt <= c.max_resamples; ++attempt) {
          RunRecord r = run_one(c, *golden, sig, target_for(sig, golden->count, attempt), id, attempt);
          if (r.fired) {
            rec = std::move(r);
            break;
          }
          const std::uint64_t n = ++nofire;
          if (static_cast<double>(n) > c.max_nofire_fraction * static_cast<double>(c.n_runs)) {
            throw CampaignError("more than " + std::to_string(c.max_nofire_fraction * 100) +
                                "% of runs never reached their fault (golden count " +
                                std::to_string(golden->count) + "); the workload is too nondeterministic");
          }
        }
        if (!rec) {
          throw CampaignError("run " + std::to_string(id) + " did not fire after " +
                              std::to_string(c.max_resamples) + " resamples");
        }
        std::lock_guard lock(mu);
        done[id] = *rec;
        out << rec->to_json().dump() << "\n";
        out.flush();
        ++finished;
        if (progress) progress(*rec, finished, c.n_runs);
      } catch (...) {
        std::lock_guard lock(mu);
        if (!failure) failure = std::current_exception();
        stop = true;
      }
    }
  };

  const unsigned threads = std::max<unsigned>(1, std::min<unsigned>(c.parallelism, static_cast<unsigned>(todo.size())));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);

  std::vector<RunRecord> all;
  for (auto& [id, r] : done) all.push_back(std::move(r));
  CampaignResult res = aggregate(c.name, std::move(all));
  write_result_json(res, (work / "result.json").string());
  write_result_csv(res, (work / "result.csv").string());
  return res;
}

void write_result_json(const CampaignResult& r, const std::string& path) {
  write_text(path, r.to_json().dump(2) + "\n");
}

void write_result_csv(const CampaignResult& r, const std::string& path) {
  std::string text = "class,count,rate,ci_lo,ci_hi\n";
  char line[160];
  for (const auto& s : r.classes) {
    std::snprintf(line, sizeof line, "%s,%llu,%.6f,%.6f,%.6f\n", std::string(to_string(s.outcome)).c_str(),
                  static_cast<unsigned long long>(s.count), s.rate, s.ci.lo, s.ci.hi);
    text += line;
  }
  write_text(path, text);
}

void write_stacked_csv(const std::vector<CampaignResult>& results, const std::string& path) {
  std::string text = "campaign,n_runs,benign_pct,detected_pct,sdc_pct,crash_pct\n";
  char line[256];
  for (const auto& r : results) {
    std::snprintf(line, sizeof line, "%s,%llu,%.3f,%.3f,%.3f,%.3f\n", r.name.c_str(),
                  static_cast<unsigned long long>(r.n_runs), 100 * r.classes[0].rate, 100 * r.classes[1].rate,
                  100 * r.classes[2].rate, 100 * r.classes[3].rate);
    text += line;
  }
  write_text(path, text);
}

}  // namespace faultfs::campaign
