// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstddef>
#include <cstdint>

#include "faultfs/common/grid.hpp"

namespace faultfs::classify {

/// Clusters planted into the synthetic density field. Amplitudes are in
/// units of the final grid mean (which is exactly 1).
struct HaloSpec {
  std::size_t count = 0;
  std::size_t cells = 10;      ///< connected core cells per cluster
  double amplitude = 200.0;    ///< nominal core cell mass
  double amplitude_spread = 0.5;  ///< core cells drawn from amplitude * [1 - s/2, 1 + s/2)
  std::size_t envelope_cells = 0;  ///< cells attached to each core
  double envelope_amplitude = 81.54;  ///< just under the default halo threshold
  std::size_t margin = 0;          ///< cells kept clear of every grid face
};

inline constexpr double kBackgroundSigma = 0.5;
inline constexpr double kBackgroundClamp = 20.0;

/// Lognormal background, planted non-touching clusters, total mass equal to
/// the cell count so the mean is exactly 1. Throws ConfigError when the
/// clusters cannot be placed or would carry more mass than the grid holds.
DensityGrid generate_grid(std::array<std::size_t, 3> dims, std::uint64_t seed, const HaloSpec& spec);

/// Parameters of the bundled toy workload's grid.
HaloSpec toy_halo_spec(std::size_t count);

}  // namespace faultfs::classify
