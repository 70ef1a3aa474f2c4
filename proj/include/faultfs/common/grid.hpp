// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstddef>
#include <vector>

namespace faultfs {

/// 3-D scalar field in C order: cell (x, y, z) lives at (x*ny + y)*nz + z.
struct DensityGrid {
  std::array<std::size_t, 3> dims{1, 1, 1};
  std::vector<double> cells;

  DensityGrid() = default;
  DensityGrid(std::size_t nx, std::size_t ny, std::size_t nz, double fill = 0.0)
      : dims{nx, ny, nz}, cells(nx * ny * nz, fill) {}

  std::size_t size() const { return cells.size(); }
  std::size_t index(std::size_t x, std::size_t y, std::size_t z) const {
    return (x * dims[1] + y) * dims[2] + z;
  }
  double& at(std::size_t x, std::size_t y, std::size_t z) { return cells[index(x, y, z)]; }
  double at(std::size_t x, std::size_t y, std::size_t z) const { return cells[index(x, y, z)]; }

  /// Left-to-right sum divided by the cell count. The order is fixed so the
  /// value is reproducible bit for bit.
  double mean() const {
    if (cells.empty()) return 0.0;
    double s = 0.0;
    for (double c : cells) s += c;
    return s / static_cast<double>(cells.size());
  }

  friend bool operator==(const DensityGrid&, const DensityGrid&) = default;
};

}  // namespace faultfs
