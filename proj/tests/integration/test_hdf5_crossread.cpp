// SPDX-License-Identifier: Apache-2.0
//
// Reads files produced by the writer back through libhdf5.

#include <hdf5.h>

#include <gtest/gtest.h>

#include <random>

#include "faultfs/classify/grid_gen.hpp"
#include "faultfs/hdf5/writer.hpp"
#include "helpers/tempdir.hpp"

using namespace faultfs;
using fixtures::TempDir;

namespace {

std::vector<double> read_back(const std::string& path, std::vector<hsize_t>& dims) {
  const hid_t f = H5Fopen(path.c_str(), H5F_ACC_RDONLY, H5P_DEFAULT);
  if (f < 0) return {};
  const hid_t d = H5Dopen2(f, "density", H5P_DEFAULT);
  const hid_t s = H5Dget_space(d);
  dims.assign(static_cast<std::size_t>(H5Sget_simple_extent_ndims(s)), 0);
  H5Sget_simple_extent_dims(s, dims.data(), nullptr);
  std::vector<double> out(static_cast<std::size_t>(H5Sget_simple_extent_npoints(s)));
  const herr_t rc = H5Dread(d, H5T_NATIVE_DOUBLE, H5S_ALL, H5S_ALL, H5P_DEFAULT, out.data());
  H5Sclose(s);
  H5Dclose(d);
  H5Fclose(f);
  if (rc < 0) out.clear();
  return out;
}

}  // namespace

TEST(LibHdf5, ReadsWrittenFiles) {
  TempDir dir;
  std::mt19937_64 rng(3);
  for (int i = 0; i < 20; ++i) {
    const std::size_t nx = 2 + rng() % 15, ny = 2 + rng() % 15, nz = 2 + rng() % 15;
    DensityGrid g(nx, ny, nz);
    std::uniform_real_distribution<double> u(0, 5);
    for (auto& c : g.cells) c = u(rng);
    const auto p = i % 2 ? hdf5::Precision::F32 : hdf5::Precision::F64;
    const auto file = hdf5::write_dataset(g, p);
    const std::string path = dir / ("g" + std::to_string(i) + ".h5");
    fixtures::spit(path, file.bytes);

    std::vector<hsize_t> dims;
    const auto back = read_back(path, dims);
    ASSERT_EQ(back.size(), g.size()) << path;
    EXPECT_EQ(dims, (std::vector<hsize_t>{nx, ny, nz}));
    for (std::size_t k = 0; k < back.size(); ++k) {
      const double want = p == hdf5::Precision::F32 ? static_cast<double>(static_cast<float>(g.cells[k])) : g.cells[k];
      ASSERT_EQ(back[k], want) << k;
    }
  }
}

TEST(LibHdf5, ReadsTheToyFile) {
  TempDir dir;
  const auto g = classify::generate_grid({32, 32, 32}, 1, classify::toy_halo_spec(4));
  const std::string path = dir / "toy.h5";
  fixtures::spit(path, hdf5::write_dataset(g, hdf5::Precision::F64).bytes);
  std::vector<hsize_t> dims;
  EXPECT_EQ(read_back(path, dims), g.cells);
}
