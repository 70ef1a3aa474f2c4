// SPDX-License-Identifier: Apache-2.0
//
// Small deterministic I/O workloads used to exercise the interposition
// layer: a fixed number of writes, FIFO creation, a chmod, a seeded random
// op sequence and a block copy.

#include <fcntl.h>
#include <sys/stat.h>
#include <unistd.h>

#include <cerrno>
#include <cstdio>
#include <cstring>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "faultfs/interpose/random_workload.hpp"

namespace {

int fail(const std::string& what) {
  std::fprintf(stderr, "faultfs-io-workload: %s: %s\n", what.c_str(), std::strerror(errno));
  return 1;
}

int do_writes(const std::string& out, std::size_t count, std::size_t size) {
  const int fd = ::open(out.c_str(), O_WRONLY | O_CREAT | O_TRUNC, 0644);
  if (fd < 0) return fail(out);
  std::vector<unsigned char> buf(size);
  for (std::size_t i = 0; i < count; ++i) {
    for (std::size_t j = 0; j < size; ++j) buf[j] = static_cast<unsigned char>('A' + (i + j) % 26);
    if (::pwrite(fd, buf.data(), size, static_cast<off_t>(i * size)) != static_cast<ssize_t>(size)) {
      return fail("pwrite");
    }
  }
  return ::close(fd) == 0 ? 0 : fail("close");
}

int do_fifos(const std::string& dir, std::size_t count) {
  for (std::size_t i = 0; i < count; ++i) {
    const std::string p = dir + "/fifo" + std::to_string(i);
    if (::mknod(p.c_str(), S_IFIFO | 0644, 0) != 0) return fail(p);
  }
  return 0;
}

int do_copy(const std::string& from, const std::string& to, std::size_t block) {
  const int in = ::open(from.c_str(), O_RDONLY);
  if (in < 0) return fail(from);
  const int out = ::open(to.c_str(), O_WRONLY | O_CREAT | O_TRUNC, 0644);
  if (out < 0) return fail(to);
  std::vector<unsigned char> buf(block);
  for (;;) {
    const ssize_t n = ::read(in, buf.data(), buf.size());
    if (n < 0) return fail("read");
    if (n == 0) break;
    if (::write(out, buf.data(), static_cast<std::size_t>(n)) != n) return fail("write");
  }
  ::close(in);
  return ::close(out) == 0 ? 0 : fail("close");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Deterministic I/O workloads for interposition tests"};
  app.require_subcommand(1);

  std::string out, dir, path, from, to;
  std::size_t count = 1, size = 4096, block = 4096, ops = 100;
  std::uint64_t seed = 1;
  std::string mode_text = "644";

  auto* writes = app.add_subcommand("writes", "COUNT pwrite calls of SIZE bytes to OUT");
  writes->add_option("--out", out)->required();
  writes->add_option("--count", count);
  writes->add_option("--size", size);

  auto* fifos = app.add_subcommand("fifos", "create COUNT FIFOs in DIR via mknod");
  fifos->add_option("--dir", dir)->required();
  fifos->add_option("--count", count);

  auto* chmod_cmd = app.add_subcommand("chmod", "chmod PATH to an octal MODE");
  chmod_cmd->add_option("--path", path)->required();
  chmod_cmd->add_option("--mode", mode_text);

  auto* random = app.add_subcommand("random", "seeded create/write/truncate/chmod sequence");
  random->add_option("--dir", dir)->required();
  random->add_option("--seed", seed);
  random->add_option("--ops", ops);

  auto* copy = app.add_subcommand("copy", "read/write copy in BLOCK-sized pieces");
  copy->add_option("--from", from)->required();
  copy->add_option("--to", to)->required();
  copy->add_option("--block", block);

  CLI11_PARSE(app, argc, argv);

  if (*writes) return do_writes(out, count, size);
  if (*fifos) return do_fifos(dir, count);
  if (*chmod_cmd) {
    const auto mode = static_cast<mode_t>(std::stoul(mode_text, nullptr, 8));
    return ::chmod(path.c_str(), mode) == 0 ? 0 : fail(path);
  }
  if (*random) {
    const int rc = faultfs::interpose::run_ops_posix(dir, faultfs::interpose::generate_ops(seed, ops));
    if (rc != 0) {
      errno = rc;
      return fail("random workload");
    }
    return 0;
  }
  return do_copy(from, to, block);
}
