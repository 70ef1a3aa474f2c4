// SPDX-License-Identifier: Apache-2.0
#pragma once

// Fault generator, I/O profiler and fault injector. Every run is a fresh
// workspace and a fresh interposition session; results are appended to
// runs.ndjson under the campaign workdir so an interrupted campaign can
// resume.

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "faultfs/campaign/config.hpp"
#include "faultfs/campaign/stats.hpp"
#include "faultfs/classify/policy.hpp"
#include "faultfs/common/outcome.hpp"
#include "faultfs/common/random.hpp"
#include "faultfs/interpose/session_log.hpp"
#include "json.hpp"

namespace faultfs::campaign {

struct Golden {
  std::uint64_t count = 0;  ///< invocations of the target primitive
  std::array<std::uint64_t, interpose::kPrimitiveCount> counts{};
  double seconds = 0;
  classify::GoldenOutputs outputs;

  nlohmann::json to_json() const;
};

/// Runs the workload fault-free through a counting session, caches the
/// golden outputs under <workdir>/golden and writes <workdir>/profile.json.
/// CampaignError when the workload or analysis fails.
Golden profile(const CampaignConfig& config);

/// Reads a cached profile; nullopt when absent.
std::optional<Golden> load_profile(const CampaignConfig& config);

/// Pure function of (config seed, fault template, run_id).
interpose::FaultSignature generate_signature(const CampaignConfig& config, std::uint64_t run_id);

/// Uniform over [0, count). CampaignError when count is 0.
std::uint64_t pick_target(std::uint64_t count, Rng& rng);

/// Index for a given resampling attempt of one run.
std::uint64_t target_for(const interpose::FaultSignature& sig, std::uint64_t count, std::uint32_t attempt);

struct RunRecord {
  std::uint64_t run_id = 0;
  std::uint32_t attempt = 0;  ///< resamples used before the fault fired
  std::uint64_t rng_seed = 0;
  std::uint64_t target_index = 0;
  bool fired = false;
  OutcomeClass outcome = OutcomeClass::Benign;
  int exit_code = 0;
  int term_signal = 0;
  bool timed_out = false;
  double seconds = 0;
  std::optional<double> summary_stat;
  std::optional<bool> suspect;
  nlohmann::json stats = nlohmann::json::object();  ///< record_keys from the summary
  std::optional<interpose::LogRecord> injected;     ///< the corrupted call
  std::uint64_t injected_records = 0;               ///< must be 1 for a fired run
  std::string artifacts;

  nlohmann::json to_json() const;
  static RunRecord from_json(const nlohmann::json& j);
};

/// One fresh session with the fault armed at `index` (nullopt: unarmed,
/// which must classify as benign for a deterministic workload). An armed
/// run whose fault never fired comes back with fired == false; the
/// campaign discards and resamples it.
RunRecord run_one(const CampaignConfig& config, const Golden& golden,
                  const interpose::FaultSignature& sig, std::optional<std::uint64_t> index,
                  std::uint64_t run_id, std::uint32_t attempt = 0);

struct ClassStat {
  OutcomeClass outcome = OutcomeClass::Benign;
  std::uint64_t count = 0;
  double rate = 0;
  Interval ci;
};

struct CampaignResult {
  std::string name;
  std::uint64_t n_runs = 0;
  std::uint64_t nofire_attempts = 0;
  std::array<ClassStat, 4> classes{};
  std::vector<RunRecord> runs;  ///< ordered by run_id

  std::uint64_t count(OutcomeClass c) const { return classes[static_cast<std::size_t>(c)].count; }
  nlohmann::json to_json() const;
};

CampaignResult aggregate(const std::string& name, std::vector<RunRecord> runs, double level = 0.95);

using ProgressFn = std::function<void(const RunRecord&, std::uint64_t done, std::uint64_t total)>;

/// Profiles (or reuses the cached profile when resuming), then completes
/// n_runs runs. With `resume`, records already in runs.ndjson are kept.
/// CampaignError when too many runs fail to fire.
CampaignResult run_campaign(const CampaignConfig& config, bool resume, const ProgressFn& progress = {});

/// Reads <workdir>/runs.ndjson (torn trailing lines are ignored).
std::vector<RunRecord> read_run_records(const std::string& path);

void write_result_json(const CampaignResult& r, const std::string& path);
/// Columns: class,count,rate,ci_lo,ci_hi
void write_result_csv(const CampaignResult& r, const std::string& path);
/// One row per campaign with percentage columns for stacked bars.
void write_stacked_csv(const std::vector<CampaignResult>& results, const std::string& path);

}  // namespace faultfs::campaign
