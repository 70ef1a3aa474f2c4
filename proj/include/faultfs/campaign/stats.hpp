// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <span>

namespace faultfs::campaign {

struct Interval {
  double lo = 0.0;
  double hi = 1.0;
};

/// Two-sided standard normal quantile for a central `level` (0.95 -> 1.96).
double normal_critical(double level);

/// Wilson score interval for k successes in n trials. Requires n >= 1 and
/// k <= n; lo <= k/n <= hi, clamped to [0, 1].
Interval wilson_interval(std::uint64_t k, std::uint64_t n, double level = 0.95);

/// Half-width of the normal-approximation (Wald) interval.
double wald_half_width(double p, std::uint64_t n, double level = 0.95);

/// Pearson statistic of `observed` against a uniform expectation.
double chi_square_uniform_statistic(std::span<const std::uint64_t> observed);

/// Upper critical value of chi-square with `df` degrees of freedom.
double chi_square_critical(std::uint64_t df, double alpha);

}  // namespace faultfs::campaign
