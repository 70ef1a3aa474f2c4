// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>

namespace faultfs {

/// Outcome of one fault-injection run, judged against the golden run.
enum class OutcomeClass : std::uint8_t { Benign, Detected, Sdc, Crash };

inline constexpr std::array<OutcomeClass, 4> kAllOutcomes = {
    OutcomeClass::Benign, OutcomeClass::Detected, OutcomeClass::Sdc, OutcomeClass::Crash};

constexpr std::string_view to_string(OutcomeClass c) {
  switch (c) {
    case OutcomeClass::Benign: return "benign";
    case OutcomeClass::Detected: return "detected";
    case OutcomeClass::Sdc: return "sdc";
    case OutcomeClass::Crash: return "crash";
  }
  return "?";
}

constexpr std::optional<OutcomeClass> parse_outcome(std::string_view s) {
  for (OutcomeClass c : kAllOutcomes) {
    if (to_string(c) == s) return c;
  }
  return std::nullopt;
}

}  // namespace faultfs
