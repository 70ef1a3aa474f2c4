// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <string_view>

namespace faultfs::classify {

enum class Verdict { Clean, Suspect };

inline constexpr double kDefaultRelTol = 0.001;

inline constexpr std::string_view to_string(Verdict v) {
  return v == Verdict::Clean ? "clean" : "suspect";
}

/// Flags a grid whose mean drifted from 1 by rel_tol or more. Non-finite
/// means are always suspect.
inline Verdict average_value_detect(double mean, double rel_tol = kDefaultRelTol) {
  if (!std::isfinite(mean)) return Verdict::Suspect;
  return std::fabs(mean - 1.0) >= rel_tol ? Verdict::Suspect : Verdict::Clean;
}

}  // namespace faultfs::classify
