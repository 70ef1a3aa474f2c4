// SPDX-License-Identifier: Apache-2.0
//
// Post-analysis of a toy output file: halo catalog plus a summary with the
// grid mean and the average-value verdict. Exits 3 when the file cannot be
// parsed or decoded.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>

#include "CLI11.hpp"
#include "faultfs/classify/toy.hpp"

namespace {

bool write_text(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::trunc);
  out << text;
  return static_cast<bool>(out);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Find halos in a density grid file"};
  std::string in;
  std::string out = ".";
  faultfs::classify::AnalysisParams params;
  app.add_option("--in", in, "HDF5 file")->required();
  app.add_option("--out", out, "Directory for catalog.csv and summary.json");
  app.add_option("--threshold", params.threshold, "Halo density threshold");
  app.add_option("--min-cells", params.min_cells, "Smallest halo kept");
  app.add_option("--rel-tol", params.rel_tol, "Average-value detector tolerance");
  CLI11_PARSE(app, argc, argv);

  std::ifstream f(in, std::ios::binary);
  if (!f) {
    std::fprintf(stderr, "faultfs-toy-analyze: cannot open %s\n", in.c_str());
    return 1;
  }
  const faultfs::Bytes bytes(std::istreambuf_iterator<char>(f), {});
  faultfs::classify::ToyAnalysis a;
  try {
    a = faultfs::classify::analyze_file(bytes, params);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "faultfs-toy-analyze: %s: %s\n", in.c_str(), e.what());
    return 3;
  }
  const std::filesystem::path dir(out);
  if (!write_text(dir / faultfs::classify::kCatalogFile, a.catalog) ||
      !write_text(dir / faultfs::classify::kSummaryFile, a.summary)) {
    std::fprintf(stderr, "faultfs-toy-analyze: cannot write results under %s\n", out.c_str());
    return 1;
  }
  return 0;
}
