// SPDX-License-Identifier: Apache-2.0
#pragma once

// Campaign configs over the bundled toy workload, built in code so tests
// do not depend on the working directory.

#include <cstdint>
#include <string>

#include "faultfs/campaign/config.hpp"
#include "json.hpp"

namespace faultfs::fixtures {

/// Golden write count of the 32^3 f64 toy file: 64 raw data chunks of
/// 4096 bytes, the metadata block, the superblock rewrite.
inline constexpr std::uint64_t kToyWriteCount = 66;

inline nlohmann::json toy_config_doc(const std::string& model, std::uint64_t n_runs, const std::string& workdir,
                                     std::uint64_t seed = 20240607) {
  nlohmann::json fault = {{"model", model}, {"primitive", "write"}};
  if (model == "BitFlip") fault["bitflip_n"] = 2;
  if (model == "ShornWrite") fault["shorn_keep_eighths"] = 4;
  return {
      {"schema_version", 1},
      {"name", "toy_" + model},
      {"seed", seed},
      {"n_runs", n_runs},
      {"workdir", workdir},
      {"workload",
       {{"steps", {{"{bin}/faultfs-toy-write", "--out", "{root}/density.h5", "--dims", "32", "--seed", "1", "--halos", "4"}}},
        {"analysis", {{"{bin}/faultfs-toy-analyze", "--in", "{root}/density.h5", "--out", "{root}"}}}}},
      {"fault", fault},
      {"policy",
       {{"mode", "BitwiseOnly"},
        {"compared_outputs", {"catalog.csv"}},
        {"required_outputs", {"density.h5"}},
        {"stat_file", "summary.json"},
        {"stat_key", "n_halos"},
        {"detector", "zero_halos"},
        {"suspect_key", "verdict"},
        {"record_keys", {"mean", "n_halos"}}}},
  };
}

inline campaign::CampaignConfig toy_config(const std::string& model, std::uint64_t n_runs, const std::string& workdir,
                                           std::uint64_t seed = 20240607) {
  return campaign::parse_config(toy_config_doc(model, n_runs, workdir, seed), workdir);
}

}  // namespace faultfs::fixtures
