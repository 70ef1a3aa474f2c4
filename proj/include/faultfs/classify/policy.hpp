// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "faultfs/common/bytes.hpp"
#include "faultfs/common/outcome.hpp"

namespace faultfs::classify {

enum class PolicyMode { BitwiseOnly, ThresholdRange };

/// How a run that differs from golden is split into detected / SDC.
enum class DomainDetector {
  None,       ///< every difference is SDC
  ZeroHalos,  ///< summary_stat == 0 (no halo found) means detected
};

struct ClassificationPolicy {
  PolicyMode mode = PolicyMode::BitwiseOnly;
  std::vector<std::string> compared_outputs;  ///< compared bitwise against golden
  std::vector<std::string> required_outputs;  ///< absence means crash
  double sdc_lo = 0.0;  ///< ThresholdRange: stat inside [lo, hi] is SDC
  double sdc_hi = 0.0;
  std::string stat_file;  ///< output holding the summary statistic
  std::string stat_key;   ///< JSON key inside stat_file; empty = whole file is a number
  DomainDetector detector = DomainDetector::None;
  /// Treat runs the average-value detector marked suspect as detected.
  bool suspect_is_detected = false;
  double timeout_factor = 10.0;

  /// Throws ConfigError on inconsistent settings.
  void validate() const;
};

struct RunOutcome {
  int exit_code = 0;
  int term_signal = 0;
  bool timed_out = false;
  /// Output name -> contents; nullopt when the file was not produced.
  std::map<std::string, std::optional<Bytes>> outputs;
  std::optional<double> summary_stat;
  std::optional<bool> suspect;  ///< average-value detector verdict, if reported
};

using GoldenOutputs = std::map<std::string, Bytes>;

/// Reads a number from `contents`, either the whole text or `key` of a
/// JSON object. nullopt when nothing numeric is found.
std::optional<double> extract_stat(const Bytes& contents, const std::string& key);

OutcomeClass classify_run(const RunOutcome& outcome, const GoldenOutputs& golden,
                          const ClassificationPolicy& policy);

}  // namespace faultfs::classify
