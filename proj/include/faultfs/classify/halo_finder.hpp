// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include "faultfs/common/grid.hpp"

namespace faultfs::classify {

inline constexpr double kHaloThreshold = 81.66;
inline constexpr std::size_t kHaloMinCells = 8;

struct Halo {
  std::vector<std::size_t> cells;  ///< ascending flat indices
  double mass = 0.0;               ///< summed in ascending index order
  std::array<double, 3> centroid{};

  friend bool operator==(const Halo&, const Halo&) = default;
};

/// Face-connected components of cells heavier than threshold_factor * mean,
/// keeping those with at least min_cells members. Ordered by mass
/// (descending), then centroid, then first cell.
std::vector<Halo> halo_finder(const DensityGrid& grid, double threshold_factor = kHaloThreshold,
                              std::size_t min_cells = kHaloMinCells);

/// CSV with header id,n_cells,mass,cx,cy,cz; numbers printed round-trippable.
std::string format_catalog(const std::vector<Halo>& halos);

}  // namespace faultfs::classify
