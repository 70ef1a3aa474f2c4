// SPDX-License-Identifier: Apache-2.0
#pragma once

// Small shared fixtures. The 8^3 grid cannot hold halos at the default
// threshold (a single 8-cell halo would outweigh the whole grid), so its
// analysis uses a lower threshold.

#include "faultfs/classify/grid_gen.hpp"
#include "faultfs/classify/toy.hpp"
#include "faultfs/hdf5/writer.hpp"

namespace faultfs::fixtures {

inline classify::HaloSpec fixture_halos() {
  classify::HaloSpec s;
  s.count = 2;
  s.cells = 6;
  s.amplitude = 30.0;
  // Interior halos survive a one-row shift of the raw data intact.
  s.margin = 1;
  return s;
}

inline classify::AnalysisParams fixture_params() {
  classify::AnalysisParams p;
  p.threshold = 10.0;
  p.min_cells = 4;
  return p;
}

inline constexpr std::uint64_t kFixtureSeed = 20240607;

inline DensityGrid fixture_grid() {
  return classify::generate_grid({8, 8, 8}, kFixtureSeed, fixture_halos());
}

inline hdf5::EncodedFile fixture_file(hdf5::Precision p = hdf5::Precision::F64) {
  return hdf5::write_dataset(fixture_grid(), p);
}

}  // namespace faultfs::fixtures
