// SPDX-License-Identifier: Apache-2.0
#include "faultfs/campaign/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/normal.hpp>

#include "faultfs/common/error.hpp"

namespace faultfs::campaign {

double normal_critical(double level) {
  if (!(level > 0.0 && level < 1.0)) throw PreconditionError("confidence level must lie in (0, 1)");
  return boost::math::quantile(boost::math::normal(), 0.5 + level / 2.0);
}

Interval wilson_interval(std::uint64_t k, std::uint64_t n, double level) {
  if (n == 0 || k > n) throw PreconditionError("wilson_interval needs 0 <= k <= n and n >= 1");
  const double z = normal_critical(level);
  const double nn = static_cast<double>(n);
  const double p = static_cast<double>(k) / nn;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / nn;
  const double centre = (p + z2 / (2.0 * nn)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn)) / denom;
  Interval ci{centre - half, centre + half};
  // Exact endpoints at the extremes; rounding would otherwise leave 1e-17.
  if (k == 0) ci.lo = 0.0;
  if (k == n) ci.hi = 1.0;
  ci.lo = std::clamp(std::min(ci.lo, p), 0.0, 1.0);
  ci.hi = std::clamp(std::max(ci.hi, p), 0.0, 1.0);
  return ci;
}

double wald_half_width(double p, std::uint64_t n, double level) {
  return normal_critical(level) * std::sqrt(p * (1.0 - p) / static_cast<double>(n));
}

double chi_square_uniform_statistic(std::span<const std::uint64_t> observed) {
  if (observed.empty()) return 0.0;
  const double total = static_cast<double>(std::accumulate(observed.begin(), observed.end(), std::uint64_t{0}));
  const double expected = total / static_cast<double>(observed.size());
  double stat = 0.0;
  for (std::uint64_t o : observed) {
    const double d = static_cast<double>(o) - expected;
    stat += d * d / expected;
  }
  return stat;
}

double chi_square_critical(std::uint64_t df, double alpha) {
  return boost::math::quantile(boost::math::complement(boost::math::chi_squared(static_cast<double>(df)), alpha));
}

}  // namespace faultfs::campaign
