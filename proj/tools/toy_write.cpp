// SPDX-License-Identifier: Apache-2.0
//
// Simulation stand-in: generates a seeded density grid and writes it as an
// HDF5 file with one pwrite per planned flush, raw data first and metadata
// last, the way a buffered library emits it, then sizes the file to its
// end of allocation on close.

#include <fcntl.h>
#include <unistd.h>

#include <cerrno>
#include <cstdio>
#include <cstring>
#include <string>

#include "CLI11.hpp"
#include "faultfs/classify/grid_gen.hpp"
#include "faultfs/hdf5/writer.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Write a synthetic density grid as an HDF5 file"};
  std::string out;
  std::size_t dims = 32;
  std::uint64_t seed = 1;
  std::size_t halos = 4;
  std::string precision = "f64";
  std::size_t chunk = 4096;
  app.add_option("--out", out, "Output file")->required();
  app.add_option("--dims", dims, "Cells per axis")->check(CLI::Range(4, 512));
  app.add_option("--seed", seed, "Grid seed");
  app.add_option("--halos", halos, "Planted clusters");
  app.add_option("--precision", precision, "Element type")->check(CLI::IsMember({"f32", "f64"}));
  app.add_option("--chunk", chunk, "Raw data bytes per write")->check(CLI::Range(1, 1 << 24));
  CLI11_PARSE(app, argc, argv);

  using namespace faultfs;
  hdf5::EncodedFile file;
  try {
    const DensityGrid grid = classify::generate_grid({dims, dims, dims}, seed, classify::toy_halo_spec(halos));
    file = hdf5::write_dataset(grid, precision == "f32" ? hdf5::Precision::F32 : hdf5::Precision::F64);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "faultfs-toy-write: %s\n", e.what());
    return 2;
  }

  const int fd = ::open(out.c_str(), O_WRONLY | O_CREAT | O_TRUNC, 0644);
  if (fd < 0) {
    std::fprintf(stderr, "faultfs-toy-write: %s: %s\n", out.c_str(), std::strerror(errno));
    return 1;
  }
  for (const auto& w : hdf5::plan_writes(file, chunk)) {
    const ssize_t n = ::pwrite(fd, w.data.data(), w.data.size(), static_cast<off_t>(w.offset));
    if (n != static_cast<ssize_t>(w.data.size())) {
      std::fprintf(stderr, "faultfs-toy-write: pwrite at %llu: %s\n",
                   static_cast<unsigned long long>(w.offset), n < 0 ? std::strerror(errno) : "short write");
      return 1;
    }
  }
  // Like the library's file driver on close: size the file to its end of
  // allocation, so a lost final chunk reads back as zeros.
  if (::ftruncate(fd, static_cast<off_t>(file.bytes.size())) != 0) {
    std::fprintf(stderr, "faultfs-toy-write: ftruncate: %s\n", std::strerror(errno));
    return 1;
  }
  if (::close(fd) != 0) {
    std::fprintf(stderr, "faultfs-toy-write: close: %s\n", std::strerror(errno));
    return 1;
  }
  return 0;
}
