// SPDX-License-Identifier: Apache-2.0
#include "faultfs/classify/halo_finder.hpp"

#include <algorithm>
#include <cstdio>
#include <string>
#include <tuple>

namespace faultfs::classify {

std::vector<Halo> halo_finder(const DensityGrid& grid, double threshold_factor,
                              std::size_t min_cells) {
  const auto [nx, ny, nz] = grid.dims;
  const double cut = threshold_factor * grid.mean();
  const std::size_t n = grid.size();

  std::vector<char> candidate(n, 0);
  for (std::size_t i = 0; i < n; ++i) candidate[i] = grid.cells[i] > cut;

  std::vector<Halo> halos;
  std::vector<char> seen(n, 0);
  std::vector<std::size_t> stack;
  for (std::size_t start = 0; start < n; ++start) {
    if (!candidate[start] || seen[start]) continue;
    Halo h;
    stack.assign(1, start);
    seen[start] = 1;
    while (!stack.empty()) {
      const std::size_t i = stack.back();
      stack.pop_back();
      h.cells.push_back(i);
      const std::size_t x = i / (ny * nz), y = i / nz % ny, z = i % nz;
      auto visit = [&](std::size_t j) {
        if (candidate[j] && !seen[j]) {
          seen[j] = 1;
          stack.push_back(j);
        }
      };
      if (x > 0) visit(i - ny * nz);
      if (x + 1 < nx) visit(i + ny * nz);
      if (y > 0) visit(i - nz);
      if (y + 1 < ny) visit(i + nz);
      if (z > 0) visit(i - 1);
      if (z + 1 < nz) visit(i + 1);
    }
    if (h.cells.size() < min_cells) continue;
    std::sort(h.cells.begin(), h.cells.end());
    double sx = 0, sy = 0, sz = 0;
    for (std::size_t i : h.cells) {
      h.mass += grid.cells[i];
      sx += static_cast<double>(i / (ny * nz));
      sy += static_cast<double>(i / nz % ny);
      sz += static_cast<double>(i % nz);
    }
    const double k = static_cast<double>(h.cells.size());
    h.centroid = {sx / k, sy / k, sz / k};
    halos.push_back(std::move(h));
  }

  std::sort(halos.begin(), halos.end(), [](const Halo& a, const Halo& b) {
    if (a.mass != b.mass) return a.mass > b.mass;
    if (a.centroid != b.centroid) return a.centroid < b.centroid;
    return a.cells.front() < b.cells.front();
  });
  return halos;
}

std::string format_catalog(const std::vector<Halo>& halos) {
  std::string out = "id,n_cells,mass,cx,cy,cz\n";
  char buf[256];
  for (std::size_t i = 0; i < halos.size(); ++i) {
    const Halo& h = halos[i];
    std::snprintf(buf, sizeof buf, "%zu,%zu,%.17g,%.17g,%.17g,%.17g\n", i, h.cells.size(), h.mass,
                  h.centroid[0], h.centroid[1], h.centroid[2]);
    out += buf;
  }
  return out;
}

}  // namespace faultfs::classify
