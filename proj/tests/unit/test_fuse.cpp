// SPDX-License-Identifier: Apache-2.0
#include <fcntl.h>
#include <sys/stat.h>

#include <gtest/gtest.h>

#include <filesystem>
#include <random>

#include "faultfs/common/process.hpp"
#include "faultfs/interpose/fuse_adapter.hpp"
#include "faultfs/interpose/session.hpp"
#include "faultfs/interpose/session_log.hpp"
#include "helpers/tempdir.hpp"

using namespace faultfs;
using namespace faultfs::interpose;
using faultfs::faultmodel::FaultKind;
using fixtures::slurp;
using fixtures::spit;
using fixtures::TempDir;

namespace {

#define REQUIRE_FUSE()                                   \
  do {                                                   \
    std::string why;                                     \
    if (!FuseMount::available(&why)) GTEST_SKIP() << why; \
  } while (0)

Bytes random_bytes(std::size_t n, std::uint32_t seed) {
  std::mt19937 g(seed);
  Bytes b(n);
  for (auto& x : b) x = static_cast<std::uint8_t>(g());
  return b;
}

ProcessResult run(std::vector<std::string> argv) {
  ProcessSpec spec;
  spec.argv = std::move(argv);
  spec.unset_env = {"LD_PRELOAD"};
  spec.timeout_s = 60;
  return run_process(spec);
}

struct Fixture {
  TempDir dir;
  std::string root = dir / "root";
  std::string mnt = dir / "mnt";
  Fixture() {
    std::filesystem::create_directory(root);
    std::filesystem::create_directory(mnt);
  }
};

}  // namespace

TEST(Fuse, CopyIsTransparent) {
  REQUIRE_FUSE();
  Fixture fx;
  const Bytes src = random_bytes(1 << 20, 7);
  spit(fx.dir / "src.bin", src);
  {
    Session s(fx.root, nullptr, fx.dir / "log");
    FuseMount m(s, fx.mnt);
    ASSERT_TRUE(run({"cp", fx.dir / "src.bin", fx.mnt + "/copy.bin"}).ok());
    EXPECT_EQ(slurp(fx.mnt + "/copy.bin"), src);
    ASSERT_TRUE(run({"mkdir", "-p", fx.mnt + "/a/b"}).ok());
    ASSERT_TRUE(run({"mv", fx.mnt + "/copy.bin", fx.mnt + "/a/b/moved.bin"}).ok());
    EXPECT_EQ(slurp(fx.mnt + "/a/b/moved.bin"), src);
    ASSERT_TRUE(run({"chmod", "600", fx.mnt + "/a/b/moved.bin"}).ok());
  }
  EXPECT_EQ(slurp(fx.root + "/a/b/moved.bin"), src);
  struct stat st {};
  ASSERT_EQ(::stat((fx.root + "/a/b/moved.bin").c_str(), &st), 0);
  EXPECT_EQ(st.st_mode & 07777, 0600u);
}

TEST(Fuse, LargeWriteVolumeIsLogged) {
  REQUIRE_FUSE();
  Fixture fx;
  {
    Session s(fx.root, nullptr, fx.dir / "log");
    FuseMount m(s, fx.mnt);
    ASSERT_TRUE(run({"dd", "if=/dev/zero", "of=" + fx.mnt + "/big", "bs=1M", "count=8", "status=none"}).ok());
  }
  std::uint64_t bytes = 0;
  std::size_t writes = 0;
  for (const auto& r : SessionLog::read(fx.dir / "log")) {
    if (r.primitive != Primitive::Write) continue;
    ++writes;
    bytes += r.size.value_or(0);
  }
  EXPECT_GE(writes, 64u);
  EXPECT_EQ(bytes, 8u << 20);
  EXPECT_EQ(std::filesystem::file_size(fx.root + "/big"), 8u << 20);
}

TEST(Fuse, DroppedWriteUnderCopy) {
  REQUIRE_FUSE();
  Fixture fx;
  const Bytes src = random_bytes(1 << 20, 11);
  spit(fx.dir / "src.bin", src);
  InjectionController c;
  FaultSignature sig;
  sig.model.kind = FaultKind::DroppedWrite;
  sig.primitive = Primitive::Write;
  sig.rng_seed = 3;
  c.arm(sig, 2);
  {
    Session s(fx.root, &c, fx.dir / "log");
    FuseMount m(s, fx.mnt);
    // cp still reports success: the dropped write returns its full count.
    ASSERT_TRUE(run({"cp", fx.dir / "src.bin", fx.mnt + "/copy.bin"}).ok());
  }
  EXPECT_TRUE(c.fired());
  const Bytes out = slurp(fx.root + "/copy.bin");
  ASSERT_EQ(out.size(), src.size());
  std::uint64_t off = 0, size = 0;
  for (const auto& r : SessionLog::read(fx.dir / "log")) {
    if (r.injected) {
      off = *r.offset;
      size = *r.size;
    }
  }
  ASSERT_GT(size, 0u);
  for (std::size_t i = 0; i < out.size(); ++i) {
    const bool dropped = i >= off && i < off + size;
    if (dropped) {
      ASSERT_EQ(out[i], 0) << i;
    } else {
      ASSERT_EQ(out[i], src[i]) << i;
    }
  }
}
