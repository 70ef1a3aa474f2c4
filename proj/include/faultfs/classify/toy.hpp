// SPDX-License-Identifier: Apache-2.0
#pragma once

// Post-analysis of the bundled density-grid workload: read the dataset,
// find halos, check the average, and emit a catalog plus a summary.

#include <string>
#include <vector>

#include "faultfs/classify/detector.hpp"
#include "faultfs/classify/halo_finder.hpp"
#include "faultfs/common/bytes.hpp"
#include "faultfs/common/outcome.hpp"

namespace faultfs::classify {

inline constexpr const char* kCatalogFile = "catalog.csv";
inline constexpr const char* kSummaryFile = "summary.json";

struct AnalysisParams {
  double threshold = kHaloThreshold;
  std::size_t min_cells = kHaloMinCells;
  double rel_tol = kDefaultRelTol;
};

struct ToyAnalysis {
  std::vector<Halo> halos;
  double mean = 0.0;
  Verdict verdict = Verdict::Clean;
  std::string catalog;  ///< format_catalog(halos)
  std::string summary;  ///< JSON: mean, n_halos, verdict, rel_tol
};

ToyAnalysis analyze_grid(const DensityGrid& grid, const AnalysisParams& params = {});

/// Parses and decodes an HDF5 file first; parse errors propagate.
ToyAnalysis analyze_file(ByteSpan file, const AnalysisParams& params = {});

/// Same classification as a campaign run on the toy workload, done in
/// process: failure to analyze is a crash, an identical catalog is benign,
/// a differing catalog with no halos is detected, anything else SDC.
OutcomeClass classify_toy(const ToyAnalysis& run, const std::string& golden_catalog);

}  // namespace faultfs::classify
