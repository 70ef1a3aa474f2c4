// SPDX-License-Identifier: Apache-2.0
#include "faultfs/classify/toy.hpp"

#include <cmath>

#include "faultfs/hdf5/parser.hpp"
#include "json.hpp"

namespace faultfs::classify {

ToyAnalysis analyze_grid(const DensityGrid& grid, const AnalysisParams& params) {
  ToyAnalysis a;
  a.halos = halo_finder(grid, params.threshold, params.min_cells);
  a.mean = grid.mean();
  a.verdict = average_value_detect(a.mean, params.rel_tol);
  a.catalog = format_catalog(a.halos);
  nlohmann::ordered_json j;
  // JSON has no NaN/Inf; those become null.
  j["mean"] = std::isfinite(a.mean) ? nlohmann::ordered_json(a.mean) : nlohmann::ordered_json();
  j["n_halos"] = a.halos.size();
  j["verdict"] = to_string(a.verdict);
  j["rel_tol"] = params.rel_tol;
  a.summary = j.dump(2) + "\n";
  return a;
}

ToyAnalysis analyze_file(ByteSpan file, const AnalysisParams& params) {
  return analyze_grid(hdf5::read_dataset(file), params);
}

OutcomeClass classify_toy(const ToyAnalysis& run, const std::string& golden_catalog) {
  if (run.catalog == golden_catalog) return OutcomeClass::Benign;
  return run.halos.empty() ? OutcomeClass::Detected : OutcomeClass::Sdc;
}

}  // namespace faultfs::classify
