// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "faultfs/classify/policy.hpp"
#include "faultfs/common/error.hpp"
#include "faultfs/interpose/controller.hpp"
#include "json.hpp"

namespace faultfs::campaign {

/// Invalid configuration with one diagnostic per schema violation.
class SchemaError : public ConfigError {
 public:
  explicit SchemaError(std::vector<std::string> diagnostics);
  const std::vector<std::string>& diagnostics() const { return diagnostics_; }

 private:
  std::vector<std::string> diagnostics_;
};

using Argv = std::vector<std::string>;

struct WorkloadSpec {
  std::vector<Argv> steps;     ///< run through the interposition layer
  std::vector<Argv> analysis;  ///< post-analysis, run directly
  std::vector<std::string> inputs;  ///< files copied into each fresh workspace
  std::map<std::string, std::string> env;
};

enum class InterposeMode { Preload, Fuse };

struct CampaignConfig {
  std::string name = "campaign";
  std::uint64_t seed = 1;
  std::uint64_t n_runs = 1000;
  std::uint32_t parallelism = 1;
  std::string workdir;     ///< absolute; FAULTFS_WORKDIR/<name> when unset
  std::string config_dir;  ///< base for relative inputs and {config_dir}
  InterposeMode interpose = InterposeMode::Preload;
  bool keep_artifacts = false;

  WorkloadSpec workload;
  interpose::FaultSignature fault;  ///< template; rng_seed is per run
  classify::ClassificationPolicy policy;
  std::string suspect_key;               ///< summary key holding the detector verdict
  std::vector<std::string> record_keys;  ///< summary keys copied into run records
  double min_timeout_s = 2.0;

  std::uint32_t max_resamples = 3;
  double max_nofire_fraction = 0.05;
};

/// Schema check (SchemaError) followed by semantic checks (ConfigError).
CampaignConfig parse_config(const nlohmann::json& doc, const std::string& config_dir);
CampaignConfig load_config(const std::string& path);

/// Canonical JSON form; stored next to run records to guard --resume.
nlohmann::json config_to_json(const CampaignConfig& c);

/// Default workspace root: $FAULTFS_WORKDIR, else ./faultfs-work.
std::string default_workdir_root();

}  // namespace faultfs::campaign
