// SPDX-License-Identifier: Apache-2.0
//
// LD_PRELOAD front end. Wraps the libc entry points of the file primitives
// and sends every call that touches a path below FAULTFS_ROOT through the
// shared hooks. Controller state is the shared block at FAULTFS_CONTROL,
// records go to FAULTFS_LOG. Without FAULTFS_ROOT everything passes through.
//
// Only direct POSIX calls are seen; stdio's internal writes bypass the PLT.

#include <dirent.h>
#include <dlfcn.h>
#include <fcntl.h>
#include <limits.h>
#include <sys/stat.h>
#include <sys/types.h>
#include <unistd.h>

#include <cerrno>
#include <cstdarg>
#include <cstdlib>
#include <cstring>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "faultfs/interpose/controller.hpp"
#include "faultfs/interpose/interposer.hpp"
#include "faultfs/interpose/session_log.hpp"

using namespace faultfs;
using namespace faultfs::interpose;

namespace {

struct State {
  std::string root;
  std::unique_ptr<InjectionController> controller;
  std::unique_ptr<SessionLog> log;
  std::unique_ptr<Interposer> hooks;
  std::mutex mu;
  std::unordered_map<int, std::string> fds;  // tracked fd -> root-relative path
};

State* g_state = nullptr;
thread_local int t_depth = 0;

struct Reentry {
  Reentry() { ++t_depth; }
  ~Reentry() { --t_depth; }
};

template <typename Fn>
Fn next_symbol(const char* name) {
  return reinterpret_cast<Fn>(::dlsym(RTLD_NEXT, name));
}

#define REAL(name) \
  static const auto real_##name = next_symbol<decltype(&::name)>(#name)

std::string normalize(const std::string& p) {
  std::vector<std::string> parts;
  std::size_t i = 0;
  while (i <= p.size()) {
    const std::size_t j = std::min(p.find('/', i), p.size());
    const std::string seg = p.substr(i, j - i);
    if (seg == "..") {
      if (!parts.empty()) parts.pop_back();
    } else if (!seg.empty() && seg != ".") {
      parts.push_back(seg);
    }
    i = j + 1;
  }
  std::string out;
  for (const auto& s : parts) out += "/" + s;
  return out.empty() ? "/" : out;
}

std::string fd_path(int fd) {
  char link[64];
  std::snprintf(link, sizeof link, "/proc/self/fd/%d", fd);
  char buf[PATH_MAX];
  const ssize_t n = ::readlink(link, buf, sizeof buf - 1);
  return n > 0 ? std::string(buf, static_cast<std::size_t>(n)) : std::string();
}

/// Root-relative path ("/x/y") when `path` (relative to dirfd) lies below
/// the root.
std::optional<std::string> below_root(int dirfd, const char* path) {
  if (!g_state || !path) return std::nullopt;
  std::string abs;
  if (path[0] == '/') {
    abs = path;
  } else {
    std::string base;
    if (dirfd == AT_FDCWD) {
      char buf[PATH_MAX];
      if (!::getcwd(buf, sizeof buf)) return std::nullopt;
      base = buf;
    } else {
      base = fd_path(dirfd);
      if (base.empty()) return std::nullopt;
    }
    abs = base + "/" + path;
  }
  abs = normalize(abs);
  const std::string& root = g_state->root;
  if (abs == root) return std::string("/");
  if (abs.size() > root.size() && abs.compare(0, root.size(), root) == 0 && abs[root.size()] == '/') {
    return abs.substr(root.size());
  }
  return std::nullopt;
}

std::optional<std::string> tracked(int fd) {
  if (!g_state) return std::nullopt;
  std::lock_guard lock(g_state->mu);
  auto it = g_state->fds.find(fd);
  if (it == g_state->fds.end()) return std::nullopt;
  return it->second;
}

void track(int fd, const std::string& path) {
  std::lock_guard lock(g_state->mu);
  g_state->fds[fd] = path;
}

std::optional<std::string> untrack(int fd) {
  std::lock_guard lock(g_state->mu);
  auto it = g_state->fds.find(fd);
  if (it == g_state->fds.end()) return std::nullopt;
  std::string p = std::move(it->second);
  g_state->fds.erase(it);
  return p;
}

bool hooking() { return g_state && t_depth == 0; }

__attribute__((constructor)) void faultfs_preload_init() {
  const char* root = std::getenv("FAULTFS_ROOT");
  if (!root || !*root) return;
  Reentry guard;
  try {
    auto st = std::make_unique<State>();
    char real_root[PATH_MAX];
    st->root = ::realpath(root, real_root) ? normalize(real_root) : normalize(root);
    const char* ctl = std::getenv("FAULTFS_CONTROL");
    st->controller = ctl && *ctl
                         ? std::make_unique<InjectionController>(InjectionController::open_shared(ctl, false))
                         : std::make_unique<InjectionController>();
    const char* log = std::getenv("FAULTFS_LOG");
    st->log = log && *log ? std::make_unique<SessionLog>(log) : std::make_unique<SessionLog>();
    st->hooks = std::make_unique<Interposer>(*st->controller, *st->log);
    g_state = st.release();
  } catch (const std::exception& e) {
    std::fprintf(stderr, "faultfs preload: %s\n", e.what());
    std::_Exit(97);
  }
}

bool full_pwrite(int fd, ByteSpan data, off_t off) {
  REAL(pwrite);
  std::size_t done = 0;
  while (done < data.size()) {
    const ssize_t n = real_pwrite(fd, data.data() + done, data.size() - done, off + static_cast<off_t>(done));
    if (n < 0) {
      if (errno == EINTR) continue;
      return false;
    }
    done += static_cast<std::size_t>(n);
  }
  return true;
}

bool full_write(int fd, ByteSpan data) {
  REAL(write);
  std::size_t done = 0;
  while (done < data.size()) {
    const ssize_t n = real_write(fd, data.data() + done, data.size() - done);
    if (n < 0) {
      if (errno == EINTR) continue;
      return false;
    }
    done += static_cast<std::size_t>(n);
  }
  return true;
}

int do_open(int dirfd, const char* path, int flags, mode_t mode) {
  REAL(openat);
  std::optional<std::string> rel;
  if (hooking()) rel = below_root(dirfd, path);
  if (!rel) return real_openat(dirfd, path, flags, mode);
  Reentry guard;
  if (flags & O_CREAT) {
    g_state->hooks->record(Primitive::Create, *rel, {static_cast<std::uint64_t>(flags), mode});
  } else {
    g_state->hooks->record(Primitive::Open, *rel, {static_cast<std::uint64_t>(flags)});
  }
  const int fd = real_openat(dirfd, path, flags, mode);
  if (fd >= 0) track(fd, *rel);
  return fd;
}

mode_t va_mode(int flags, va_list ap) {
  if ((flags & O_CREAT) || (flags & O_TMPFILE) == O_TMPFILE) return static_cast<mode_t>(va_arg(ap, int));
  return 0;
}

ssize_t hooked_write(int fd, const void* buf, size_t n, std::optional<off_t> at) {
  const auto rel = tracked(fd);
  Reentry guard;
  off_t off = 0;
  bool seekable = true;
  if (at) {
    off = *at;
  } else {
    const int fl = ::fcntl(fd, F_GETFL);
    struct stat st {};
    if (fl >= 0 && (fl & O_APPEND) && ::fstat(fd, &st) == 0) {
      off = st.st_size;
    } else {
      off = ::lseek(fd, 0, SEEK_CUR);
      if (off < 0) {
        seekable = false;
        off = 0;
      }
    }
  }
  const ByteSpan payload(static_cast<const std::uint8_t*>(buf), n);
  const WritePlan plan = g_state->hooks->on_write(*rel, static_cast<std::uint64_t>(off), payload);
  if (!plan.injected) {
    if (at) {
      REAL(pwrite);
      return real_pwrite(fd, buf, n, *at);
    }
    REAL(write);
    return real_write(fd, buf, n);
  }
  if (at) {
    if (!full_pwrite(fd, plan.forward, off)) return -1;
  } else if (seekable) {
    // Forward at the caller's offset, then move the file position as if
    // the whole payload had been written.
    if (!full_pwrite(fd, plan.forward, off)) return -1;
    const int fl = ::fcntl(fd, F_GETFL);
    if (fl >= 0 && !(fl & O_APPEND)) ::lseek(fd, off + static_cast<off_t>(n), SEEK_SET);
  } else if (!full_write(fd, plan.forward)) {
    return -1;
  }
  return static_cast<ssize_t>(plan.reported);
}

int hooked_mknod(int dirfd, const char* path, mode_t mode, dev_t dev) {
  REAL(mknodat);
  std::optional<std::string> rel;
  if (hooking()) rel = below_root(dirfd, path);
  if (!rel) return real_mknodat(dirfd, path, mode, dev);
  Reentry guard;
  const ScalarPlan plan = g_state->hooks->on_scalar(Primitive::Mknod, *rel, {{mode, 4}, {dev, 8}});
  if (plan.suppress) return 0;
  return real_mknodat(dirfd, path, static_cast<mode_t>(plan.args[0].value),
                      static_cast<dev_t>(plan.args[1].value));
}

void record_path(Primitive p, int dirfd, const char* path, std::vector<std::uint64_t> args = {}) {
  if (!hooking()) return;
  const auto rel = below_root(dirfd, path);
  if (!rel) return;
  Reentry guard;
  g_state->hooks->record(p, *rel, std::move(args));
}

void record_fd(Primitive p, int fd, std::vector<std::uint64_t> args = {},
               std::optional<std::uint64_t> offset = std::nullopt,
               std::optional<std::uint64_t> size = std::nullopt) {
  if (!hooking()) return;
  const auto rel = tracked(fd);
  if (!rel) return;
  Reentry guard;
  g_state->hooks->record(p, *rel, std::move(args), offset, size);
}

}  // namespace

extern "C" {

int open(const char* path, int flags, ...) {
  va_list ap;
  va_start(ap, flags);
  const mode_t mode = va_mode(flags, ap);
  va_end(ap);
  return do_open(AT_FDCWD, path, flags, mode);
}

int open64(const char* path, int flags, ...) {
  va_list ap;
  va_start(ap, flags);
  const mode_t mode = va_mode(flags, ap);
  va_end(ap);
  return do_open(AT_FDCWD, path, flags, mode);
}

int openat(int dirfd, const char* path, int flags, ...) {
  va_list ap;
  va_start(ap, flags);
  const mode_t mode = va_mode(flags, ap);
  va_end(ap);
  return do_open(dirfd, path, flags, mode);
}

int openat64(int dirfd, const char* path, int flags, ...) {
  va_list ap;
  va_start(ap, flags);
  const mode_t mode = va_mode(flags, ap);
  va_end(ap);
  return do_open(dirfd, path, flags, mode);
}

int creat(const char* path, mode_t mode) {
  return do_open(AT_FDCWD, path, O_CREAT | O_WRONLY | O_TRUNC, mode);
}

int creat64(const char* path, mode_t mode) {
  return do_open(AT_FDCWD, path, O_CREAT | O_WRONLY | O_TRUNC, mode);
}

int close(int fd) {
  REAL(close);
  if (hooking()) {
    if (auto rel = untrack(fd)) {
      Reentry guard;
      g_state->hooks->record(Primitive::Release, *rel);
    }
  }
  return real_close(fd);
}

int dup(int fd) {
  REAL(dup);
  const int nfd = real_dup(fd);
  if (nfd >= 0 && g_state) {
    if (auto rel = tracked(fd)) track(nfd, *rel);
  }
  return nfd;
}

int dup2(int fd, int nfd) {
  REAL(dup2);
  const int r = real_dup2(fd, nfd);
  if (r >= 0 && g_state && fd != nfd) {
    untrack(nfd);
    if (auto rel = tracked(fd)) track(nfd, *rel);
  }
  return r;
}

int dup3(int fd, int nfd, int flags) {
  REAL(dup3);
  const int r = real_dup3(fd, nfd, flags);
  if (r >= 0 && g_state) {
    untrack(nfd);
    if (auto rel = tracked(fd)) track(nfd, *rel);
  }
  return r;
}

ssize_t read(int fd, void* buf, size_t n) {
  REAL(read);
  record_fd(Primitive::Read, fd, {}, std::nullopt, n);
  return real_read(fd, buf, n);
}

ssize_t pread(int fd, void* buf, size_t n, off_t off) {
  REAL(pread);
  record_fd(Primitive::Read, fd, {}, static_cast<std::uint64_t>(off), n);
  return real_pread(fd, buf, n, off);
}

ssize_t pread64(int fd, void* buf, size_t n, off64_t off) {
  REAL(pread64);
  record_fd(Primitive::Read, fd, {}, static_cast<std::uint64_t>(off), n);
  return real_pread64(fd, buf, n, off);
}

ssize_t write(int fd, const void* buf, size_t n) {
  REAL(write);
  if (!hooking() || !tracked(fd)) return real_write(fd, buf, n);
  return hooked_write(fd, buf, n, std::nullopt);
}

ssize_t pwrite(int fd, const void* buf, size_t n, off_t off) {
  REAL(pwrite);
  if (!hooking() || !tracked(fd)) return real_pwrite(fd, buf, n, off);
  return hooked_write(fd, buf, n, off);
}

ssize_t pwrite64(int fd, const void* buf, size_t n, off64_t off) {
  REAL(pwrite64);
  if (!hooking() || !tracked(fd)) return real_pwrite64(fd, buf, n, off);
  return hooked_write(fd, buf, n, static_cast<off_t>(off));
}

int truncate(const char* path, off_t len) {
  REAL(truncate);
  record_path(Primitive::Truncate, AT_FDCWD, path, {static_cast<std::uint64_t>(len)});
  return real_truncate(path, len);
}

int truncate64(const char* path, off64_t len) {
  REAL(truncate64);
  record_path(Primitive::Truncate, AT_FDCWD, path, {static_cast<std::uint64_t>(len)});
  return real_truncate64(path, len);
}

int ftruncate(int fd, off_t len) {
  REAL(ftruncate);
  record_fd(Primitive::Truncate, fd, {static_cast<std::uint64_t>(len)});
  return real_ftruncate(fd, len);
}

int ftruncate64(int fd, off64_t len) {
  REAL(ftruncate64);
  record_fd(Primitive::Truncate, fd, {static_cast<std::uint64_t>(len)});
  return real_ftruncate64(fd, len);
}

int mknod(const char* path, mode_t mode, dev_t dev) { return hooked_mknod(AT_FDCWD, path, mode, dev); }

int mknodat(int dirfd, const char* path, mode_t mode, dev_t dev) {
  return hooked_mknod(dirfd, path, mode, dev);
}

int mkfifo(const char* path, mode_t mode) { return hooked_mknod(AT_FDCWD, path, mode | S_IFIFO, 0); }

int mkfifoat(int dirfd, const char* path, mode_t mode) {
  return hooked_mknod(dirfd, path, mode | S_IFIFO, 0);
}

int fchmodat(int dirfd, const char* path, mode_t mode, int flags) {
  REAL(fchmodat);
  std::optional<std::string> rel;
  if (hooking()) rel = below_root(dirfd, path);
  if (!rel) return real_fchmodat(dirfd, path, mode, flags);
  Reentry guard;
  const ScalarPlan plan = g_state->hooks->on_scalar(Primitive::Chmod, *rel, {{mode, 4}});
  if (plan.suppress) return 0;
  return real_fchmodat(dirfd, path, static_cast<mode_t>(plan.args[0].value), flags);
}

int chmod(const char* path, mode_t mode) { return fchmodat(AT_FDCWD, path, mode, 0); }

int fchmod(int fd, mode_t mode) {
  REAL(fchmod);
  std::optional<std::string> rel;
  if (hooking()) rel = tracked(fd);
  if (!rel) return real_fchmod(fd, mode);
  Reentry guard;
  const ScalarPlan plan = g_state->hooks->on_scalar(Primitive::Chmod, *rel, {{mode, 4}});
  if (plan.suppress) return 0;
  return real_fchmod(fd, static_cast<mode_t>(plan.args[0].value));
}

int unlink(const char* path) {
  REAL(unlink);
  record_path(Primitive::Unlink, AT_FDCWD, path);
  return real_unlink(path);
}

int unlinkat(int dirfd, const char* path, int flags) {
  REAL(unlinkat);
  record_path(flags & AT_REMOVEDIR ? Primitive::Rmdir : Primitive::Unlink, dirfd, path);
  return real_unlinkat(dirfd, path, flags);
}

int rename(const char* from, const char* to) {
  REAL(rename);
  record_path(Primitive::Rename, AT_FDCWD, from);
  return real_rename(from, to);
}

int renameat(int fromfd, const char* from, int tofd, const char* to) {
  REAL(renameat);
  record_path(Primitive::Rename, fromfd, from);
  return real_renameat(fromfd, from, tofd, to);
}

int mkdir(const char* path, mode_t mode) {
  REAL(mkdir);
  record_path(Primitive::Mkdir, AT_FDCWD, path, {mode});
  return real_mkdir(path, mode);
}

int mkdirat(int dirfd, const char* path, mode_t mode) {
  REAL(mkdirat);
  record_path(Primitive::Mkdir, dirfd, path, {mode});
  return real_mkdirat(dirfd, path, mode);
}

int rmdir(const char* path) {
  REAL(rmdir);
  record_path(Primitive::Rmdir, AT_FDCWD, path);
  return real_rmdir(path);
}

int stat(const char* path, struct stat* st) {
  REAL(stat);
  record_path(Primitive::Getattr, AT_FDCWD, path);
  return real_stat(path, st);
}

int lstat(const char* path, struct stat* st) {
  REAL(lstat);
  record_path(Primitive::Getattr, AT_FDCWD, path);
  return real_lstat(path, st);
}

int fstatat(int dirfd, const char* path, struct stat* st, int flags) {
  REAL(fstatat);
  record_path(Primitive::Getattr, dirfd, path);
  return real_fstatat(dirfd, path, st, flags);
}

DIR* opendir(const char* path) {
  REAL(opendir);
  record_path(Primitive::Readdir, AT_FDCWD, path);
  return real_opendir(path);
}

int fsync(int fd) {
  REAL(fsync);
  record_fd(Primitive::Fsync, fd);
  return real_fsync(fd);
}

int fdatasync(int fd) {
  REAL(fdatasync);
  record_fd(Primitive::Fsync, fd);
  return real_fdatasync(fd);
}

}  // extern "C"
