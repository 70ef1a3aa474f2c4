// SPDX-License-Identifier: Apache-2.0
#include "faultfs/interpose/random_workload.hpp"

#include <fcntl.h>
#include <sys/stat.h>
#include <unistd.h>

#include <cerrno>
#include <filesystem>
#include <fstream>
#include <iterator>

#include "faultfs/common/random.hpp"

namespace faultfs::interpose {

namespace fs = std::filesystem;

namespace {

constexpr const char* kNames[] = {"a.dat", "b.dat", "sub/c.dat", "sub/d.dat"};

}  // namespace

std::vector<FsOp> generate_ops(std::uint64_t seed, std::size_t count) {
  Rng rng(seed);
  std::vector<FsOp> ops;
  ops.push_back({FsOpKind::Mkdir, "sub", 0, 0, 0755, {}});
  std::vector<bool> exists(std::size(kNames), false);
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t f = uniform_index(rng, std::size(kNames));
    FsOp op;
    op.path = kNames[f];
    if (!exists[f]) {
      op.kind = FsOpKind::Create;
      op.mode = static_cast<mode_t>(0600 | uniform_index(rng, 0100));
      exists[f] = true;
      ops.push_back(std::move(op));
      continue;
    }
    switch (uniform_index(rng, 6)) {
      case 0:
        op.kind = FsOpKind::Truncate;
        op.size = uniform_index(rng, 10000);
        break;
      case 1:
        op.kind = FsOpKind::Chmod;
        op.mode = static_cast<mode_t>(0600 | uniform_index(rng, 0100));
        break;
      default:
        op.kind = FsOpKind::Write;
        op.offset = uniform_index(rng, 8192);
        op.data.resize(1 + uniform_index(rng, 3000));
        for (auto& b : op.data) b = static_cast<std::uint8_t>(rng());
        break;
    }
    ops.push_back(std::move(op));
  }
  return ops;
}

int run_ops_posix(const std::string& dir, const std::vector<FsOp>& ops) {
  for (const auto& op : ops) {
    const std::string p = dir + "/" + op.path;
    int rc = 0;
    switch (op.kind) {
      case FsOpKind::Mkdir:
        rc = ::mkdir(p.c_str(), op.mode);
        break;
      case FsOpKind::Create: {
        const int fd = ::open(p.c_str(), O_WRONLY | O_CREAT | O_TRUNC, op.mode);
        rc = fd < 0 ? -1 : ::close(fd);
        break;
      }
      case FsOpKind::Write: {
        const int fd = ::open(p.c_str(), O_WRONLY);
        if (fd < 0) return errno;
        const ssize_t n = ::pwrite(fd, op.data.data(), op.data.size(), static_cast<off_t>(op.offset));
        ::close(fd);
        rc = n == static_cast<ssize_t>(op.data.size()) ? 0 : -1;
        break;
      }
      case FsOpKind::Truncate:
        rc = ::truncate(p.c_str(), static_cast<off_t>(op.size));
        break;
      case FsOpKind::Chmod:
        rc = ::chmod(p.c_str(), op.mode);
        break;
    }
    if (rc != 0) return errno ? errno : EIO;
  }
  return 0;
}

int run_ops_session(Session& s, const std::vector<FsOp>& ops) {
  for (const auto& op : ops) {
    long rc = 0;
    switch (op.kind) {
      case FsOpKind::Mkdir:
        rc = s.mkdir(op.path, op.mode);
        break;
      case FsOpKind::Create: {
        const int fh = s.create(op.path, O_WRONLY | O_TRUNC, op.mode);
        rc = fh < 0 ? fh : s.release(fh);
        break;
      }
      case FsOpKind::Write: {
        const int fh = s.open(op.path, O_WRONLY);
        if (fh < 0) return -fh;
        rc = s.write(fh, op.data, op.offset);
        s.release(fh);
        rc = rc == static_cast<long>(op.data.size()) ? 0 : (rc < 0 ? rc : -EIO);
        break;
      }
      case FsOpKind::Truncate:
        rc = s.truncate(op.path, op.size);
        break;
      case FsOpKind::Chmod:
        rc = s.chmod(op.path, op.mode);
        break;
    }
    if (rc < 0) return static_cast<int>(-rc);
  }
  return 0;
}

std::map<std::string, TreeEntry> snapshot_tree(const std::string& root) {
  std::map<std::string, TreeEntry> out;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    struct stat st {};
    if (::lstat(e.path().c_str(), &st) != 0) continue;
    TreeEntry t;
    t.mode = st.st_mode;
    if (S_ISREG(st.st_mode)) {
      std::ifstream in(e.path(), std::ios::binary);
      t.content.assign(std::istreambuf_iterator<char>(in), {});
    }
    out[fs::relative(e.path(), root).string()] = std::move(t);
  }
  return out;
}

}  // namespace faultfs::interpose
