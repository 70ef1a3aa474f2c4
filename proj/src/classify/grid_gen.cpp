// SPDX-License-Identifier: Apache-2.0
#include "faultfs/classify/grid_gen.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "faultfs/common/error.hpp"
#include "faultfs/common/random.hpp"

namespace faultfs::classify {

namespace {

using Coord = std::array<long, 3>;

class Placer {
 public:
  Placer(const DensityGrid& g, Rng& rng, std::size_t margin)
      : g_(g), rng_(rng), margin_(static_cast<long>(margin)), owner_(g.size(), -1) {}

  /// Grows a random face-connected blob of `core` cells plus `envelope`
  /// face-neighbours of it. The whole cluster keeps a one-cell gap (in all
  /// 26 directions) to earlier clusters.
  bool place(int id, std::size_t core, std::size_t envelope, std::vector<std::size_t>& core_out,
             std::vector<std::size_t>& env_out) {
    for (int attempt = 0; attempt < 200; ++attempt) {
      core_out.clear();
      env_out.clear();
      const std::size_t seed = uniform_index(rng_, g_.size());
      if (!placeable(seed)) continue;
      core_out.push_back(seed);
      if (!grow(core_out, core) || !attach(core_out, envelope, env_out)) continue;
      for (std::size_t c : core_out) owner_[c] = id;
      for (std::size_t c : env_out) owner_[c] = id;
      return true;
    }
    return false;
  }

 private:
  Coord coord(std::size_t i) const {
    const auto& d = g_.dims;
    return {static_cast<long>(i / (d[1] * d[2])), static_cast<long>(i / d[2] % d[1]),
            static_cast<long>(i % d[2])};
  }

  bool inside(const Coord& c) const {
    for (int a = 0; a < 3; ++a) {
      if (c[a] < 0 || c[a] >= static_cast<long>(g_.dims[a])) return false;
    }
    return true;
  }

  std::size_t flat(const Coord& c) const {
    return g_.index(static_cast<std::size_t>(c[0]), static_cast<std::size_t>(c[1]),
                    static_cast<std::size_t>(c[2]));
  }

  bool placeable(std::size_t i) const {
    const Coord c = coord(i);
    for (int a = 0; a < 3; ++a) {
      if (c[a] < margin_ || c[a] >= static_cast<long>(g_.dims[a]) - margin_) return false;
    }
    return free(i);
  }

  /// No earlier cluster within Chebyshev distance 1.
  bool free(std::size_t i) const {
    const Coord c = coord(i);
    for (long dx = -1; dx <= 1; ++dx) {
      for (long dy = -1; dy <= 1; ++dy) {
        for (long dz = -1; dz <= 1; ++dz) {
          const Coord n{c[0] + dx, c[1] + dy, c[2] + dz};
          if (inside(n) && owner_[flat(n)] >= 0) return false;
        }
      }
    }
    return true;
  }

  std::vector<std::size_t> frontier(const std::vector<std::size_t>& set) const {
    static constexpr Coord kFaces[6] = {{1, 0, 0}, {-1, 0, 0}, {0, 1, 0}, {0, -1, 0}, {0, 0, 1}, {0, 0, -1}};
    std::vector<std::size_t> out;
    for (std::size_t s : set) {
      const Coord c = coord(s);
      for (const Coord& f : kFaces) {
        const Coord n{c[0] + f[0], c[1] + f[1], c[2] + f[2]};
        if (!inside(n)) continue;
        const std::size_t i = flat(n);
        if (std::find(set.begin(), set.end(), i) == set.end() &&
            std::find(out.begin(), out.end(), i) == out.end() && placeable(i)) {
          out.push_back(i);
        }
      }
    }
    std::sort(out.begin(), out.end());
    return out;
  }

  bool grow(std::vector<std::size_t>& set, std::size_t target) {
    while (set.size() < target) {
      const auto f = frontier(set);
      if (f.empty()) return false;
      set.push_back(f[uniform_index(rng_, f.size())]);
    }
    return true;
  }

  bool attach(const std::vector<std::size_t>& core, std::size_t n, std::vector<std::size_t>& env) {
    auto f = frontier(core);
    if (f.size() < n) return false;
    for (std::size_t k = 0; k < n; ++k) {
      const std::size_t j = k + uniform_index(rng_, f.size() - k);
      std::swap(f[k], f[j]);
      env.push_back(f[k]);
    }
    return true;
  }

  const DensityGrid& g_;
  Rng& rng_;
  long margin_;
  std::vector<int> owner_;
};

}  // namespace

DensityGrid generate_grid(std::array<std::size_t, 3> dims, std::uint64_t seed, const HaloSpec& spec) {
  for (std::size_t d : dims) {
    if (d < 1) throw ConfigError("grid dimensions must be >= 1");
  }
  DensityGrid g(dims[0], dims[1], dims[2]);
  const std::size_t n = g.size();
  if (spec.count > 0 && (spec.cells < 1 || spec.amplitude <= 0.0)) {
    throw ConfigError("halo clusters need at least one cell and a positive amplitude");
  }
  const std::size_t planted = spec.count * (spec.cells + spec.envelope_cells);
  if (planted >= n) throw ConfigError("halo clusters do not fit in the grid");

  Rng rng(seed);
  std::vector<bool> is_halo(n, false);
  double halo_mass = 0.0;
  Placer placer(g, rng, spec.margin);
  std::vector<std::size_t> core, env;
  for (std::size_t h = 0; h < spec.count; ++h) {
    if (!placer.place(static_cast<int>(h), spec.cells, spec.envelope_cells, core, env)) {
      throw ConfigError("could not place halo cluster " + std::to_string(h) + " of " +
                        std::to_string(spec.count) + " without touching another");
    }
    for (std::size_t c : core) {
      const double u = uniform01(rng);
      g.cells[c] = spec.amplitude * (1.0 - spec.amplitude_spread / 2 + spec.amplitude_spread * u);
      is_halo[c] = true;
      halo_mass += g.cells[c];
    }
    for (std::size_t c : env) {
      g.cells[c] = spec.envelope_amplitude;
      is_halo[c] = true;
      halo_mass += g.cells[c];
    }
  }
  const double budget = static_cast<double>(n) - halo_mass;
  if (budget <= 0.0) throw ConfigError("halo clusters carry more mass than the whole grid");

  double background = 0.0;
  std::size_t last_bg = n;
  for (std::size_t i = 0; i < n; ++i) {
    if (is_halo[i]) continue;
    const double z = standard_normal(rng);
    const double v = std::min(kBackgroundClamp,
                              std::exp(kBackgroundSigma * z - kBackgroundSigma * kBackgroundSigma / 2));
    g.cells[i] = v;
    background += v;
    last_bg = i;
  }
  const double scale = budget / background;
  for (std::size_t i = 0; i < n; ++i) {
    if (!is_halo[i]) g.cells[i] *= scale;
  }

  // Absorb rounding into one background cell so that the left-to-right mean
  // is exactly 1.
  const double target = static_cast<double>(n);
  for (int iter = 0; iter < 200; ++iter) {
    double s = 0.0;
    for (double c : g.cells) s += c;
    if (s == target) break;
    double& c = g.cells[last_bg];
    const double next = c + (target - s);
    c = next != c ? next : std::nextafter(c, s < target ? HUGE_VAL : -HUGE_VAL);
  }
  return g;
}

HaloSpec toy_halo_spec(std::size_t count) {
  HaloSpec s;
  s.count = count;
  s.cells = 12;
  s.amplitude = 200.0;
  s.envelope_cells = 6;
  s.envelope_amplitude = 81.54;
  return s;
}

}  // namespace faultfs::classify
