// SPDX-License-Identifier: Apache-2.0
#include "faultfs/classify/policy.hpp"

#include <cstdlib>
#include <string>

#include "json.hpp"

#include "faultfs/common/error.hpp"

namespace faultfs::classify {

void ClassificationPolicy::validate() const {
  if (mode == PolicyMode::ThresholdRange) {
    if (!(sdc_lo <= sdc_hi)) throw ConfigError("sdc_range lower bound exceeds upper bound");
    if (stat_file.empty()) throw ConfigError("threshold-range policy needs a stat_file");
  }
  if (detector == DomainDetector::ZeroHalos && stat_file.empty()) {
    throw ConfigError("zero-halo detector needs a stat_file");
  }
  if (!(timeout_factor > 0.0)) throw ConfigError("timeout_factor must be positive");
}

std::optional<double> extract_stat(const Bytes& contents, const std::string& key) {
  const std::string text(contents.begin(), contents.end());
  if (key.empty()) {
    const char* begin = text.c_str();
    char* end = nullptr;
    const double v = std::strtod(begin, &end);
    if (end == begin) return std::nullopt;
    return v;
  }
  const auto doc = nlohmann::json::parse(text, nullptr, /*allow_exceptions=*/false);
  if (!doc.is_object() || !doc.contains(key) || !doc[key].is_number()) return std::nullopt;
  return doc[key].get<double>();
}

OutcomeClass classify_run(const RunOutcome& outcome, const GoldenOutputs& golden,
                          const ClassificationPolicy& policy) {
  if (outcome.timed_out || outcome.term_signal != 0 || outcome.exit_code != 0) {
    return OutcomeClass::Crash;
  }
  for (const std::string& name : policy.required_outputs) {
    auto it = outcome.outputs.find(name);
    if (it == outcome.outputs.end() || !it->second) return OutcomeClass::Crash;
  }

  bool identical = true;
  for (const std::string& name : policy.compared_outputs) {
    auto it = outcome.outputs.find(name);
    auto g = golden.find(name);
    if (it == outcome.outputs.end() || !it->second || g == golden.end() || *it->second != g->second) {
      identical = false;
      break;
    }
  }
  if (identical) return OutcomeClass::Benign;

  if (policy.mode == PolicyMode::ThresholdRange) {
    if (!outcome.summary_stat) return OutcomeClass::Crash;
    const double s = *outcome.summary_stat;
    return s >= policy.sdc_lo && s <= policy.sdc_hi ? OutcomeClass::Sdc : OutcomeClass::Detected;
  }
  if (policy.suspect_is_detected && outcome.suspect.value_or(false)) return OutcomeClass::Detected;
  if (policy.detector == DomainDetector::ZeroHalos) {
    if (!outcome.summary_stat) return OutcomeClass::Crash;
    return *outcome.summary_stat == 0.0 ? OutcomeClass::Detected : OutcomeClass::Sdc;
  }
  return OutcomeClass::Sdc;
}

}  // namespace faultfs::classify
