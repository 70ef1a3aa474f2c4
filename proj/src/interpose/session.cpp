// SPDX-License-Identifier: Apache-2.0
#include "faultfs/interpose/session.hpp"

#include <dirent.h>
#include <fcntl.h>
#include <sys/stat.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <cstring>

#include "faultfs/common/error.hpp"

namespace faultfs::interpose {

namespace {

std::string rel(const std::string& path) {
  std::size_t i = 0;
  while (i < path.size() && path[i] == '/') ++i;
  return i == path.size() ? std::string(".") : path.substr(i);
}

int neg_errno(int rc) { return rc < 0 ? -errno : rc; }

}  // namespace

Session::Session(const std::string& root, InjectionController* controller, const std::string& log_path)
    : root_(root),
      owned_(controller ? nullptr : std::make_unique<InjectionController>()),
      controller_(controller ? controller : owned_.get()),
      log_(),
      hooks_(*controller_, log_) {
  root_fd_ = ::open(root.c_str(), O_RDONLY | O_DIRECTORY | O_CLOEXEC);
  if (root_fd_ < 0) throw SetupError("session root " + root + ": " + std::strerror(errno));
  if (::faccessat(root_fd_, ".", W_OK | X_OK, AT_EACCESS) != 0) {
    ::close(root_fd_);
    throw SetupError("session root " + root + " is not writable");
  }
  if (!log_path.empty()) log_.open(log_path);
}

Session::~Session() {
  std::lock_guard lock(mu_);
  for (auto& [fh, path] : handles_) ::close(fh);
  handles_.clear();
  if (root_fd_ >= 0) ::close(root_fd_);
}

std::string Session::handle_path(int fh) {
  std::lock_guard lock(mu_);
  auto it = handles_.find(fh);
  return it == handles_.end() ? std::string() : it->second;
}

int Session::open(const std::string& path, int flags) {
  hooks_.record(Primitive::Open, path, {static_cast<std::uint64_t>(flags)});
  const int fd = ::openat(root_fd_, rel(path).c_str(), flags | O_CLOEXEC);
  if (fd < 0) return -errno;
  std::lock_guard lock(mu_);
  handles_[fd] = path;
  return fd;
}

int Session::create(const std::string& path, int flags, mode_t mode) {
  hooks_.record(Primitive::Create, path, {static_cast<std::uint64_t>(flags), mode});
  const int fd = ::openat(root_fd_, rel(path).c_str(), flags | O_CREAT | O_CLOEXEC, mode);
  if (fd < 0) return -errno;
  std::lock_guard lock(mu_);
  handles_[fd] = path;
  return fd;
}

ssize_t Session::read(int fh, std::span<std::uint8_t> buf, std::uint64_t offset) {
  hooks_.record(Primitive::Read, handle_path(fh), {}, offset, buf.size());
  const ssize_t n = ::pread(fh, buf.data(), buf.size(), static_cast<off_t>(offset));
  return n < 0 ? -errno : n;
}

ssize_t Session::write(int fh, ByteSpan data, std::uint64_t offset) {
  const WritePlan plan = hooks_.on_write(handle_path(fh), offset, data);
  std::size_t done = 0;
  while (done < plan.forward.size()) {
    const ssize_t n = ::pwrite(fh, plan.forward.data() + done, plan.forward.size() - done,
                               static_cast<off_t>(offset + done));
    if (n < 0) {
      if (errno == EINTR) continue;
      return -errno;
    }
    done += static_cast<std::size_t>(n);
  }
  return static_cast<ssize_t>(plan.reported);
}

int Session::truncate(const std::string& path, std::uint64_t size) {
  hooks_.record(Primitive::Truncate, path, {size});
  const int fd = ::openat(root_fd_, rel(path).c_str(), O_WRONLY | O_CLOEXEC);
  if (fd < 0) return -errno;
  const int rc = neg_errno(::ftruncate(fd, static_cast<off_t>(size)));
  ::close(fd);
  return rc;
}

int Session::mknod(const std::string& path, mode_t mode, dev_t dev) {
  const ScalarPlan plan = hooks_.on_scalar(Primitive::Mknod, path, {{mode, 4}, {dev, 8}});
  if (plan.suppress) return 0;
  return neg_errno(::mknodat(root_fd_, rel(path).c_str(), static_cast<mode_t>(plan.args[0].value),
                             static_cast<dev_t>(plan.args[1].value)));
}

int Session::chmod(const std::string& path, mode_t mode) {
  const ScalarPlan plan = hooks_.on_scalar(Primitive::Chmod, path, {{mode, 4}});
  if (plan.suppress) return 0;
  return neg_errno(::fchmodat(root_fd_, rel(path).c_str(),
                              static_cast<mode_t>(plan.args[0].value & 07777), 0));
}

int Session::unlink(const std::string& path) {
  hooks_.record(Primitive::Unlink, path);
  return neg_errno(::unlinkat(root_fd_, rel(path).c_str(), 0));
}

int Session::rename(const std::string& from, const std::string& to) {
  hooks_.record(Primitive::Rename, from + "\n" + to);
  return neg_errno(::renameat(root_fd_, rel(from).c_str(), root_fd_, rel(to).c_str()));
}

int Session::getattr(const std::string& path, struct stat& st) {
  hooks_.record(Primitive::Getattr, path);
  return neg_errno(::fstatat(root_fd_, rel(path).c_str(), &st, AT_SYMLINK_NOFOLLOW));
}

int Session::readdir(const std::string& path, std::vector<std::string>& names) {
  hooks_.record(Primitive::Readdir, path);
  const int fd = ::openat(root_fd_, rel(path).c_str(), O_RDONLY | O_DIRECTORY | O_CLOEXEC);
  if (fd < 0) return -errno;
  DIR* d = ::fdopendir(fd);
  if (!d) {
    const int e = errno;
    ::close(fd);
    return -e;
  }
  names.clear();
  while (const dirent* e = ::readdir(d)) names.emplace_back(e->d_name);
  ::closedir(d);
  std::sort(names.begin(), names.end());
  return 0;
}

int Session::mkdir(const std::string& path, mode_t mode) {
  hooks_.record(Primitive::Mkdir, path, {mode});
  return neg_errno(::mkdirat(root_fd_, rel(path).c_str(), mode));
}

int Session::rmdir(const std::string& path) {
  hooks_.record(Primitive::Rmdir, path);
  return neg_errno(::unlinkat(root_fd_, rel(path).c_str(), AT_REMOVEDIR));
}

int Session::fsync(int fh, bool datasync) {
  hooks_.record(Primitive::Fsync, handle_path(fh));
  return neg_errno(datasync ? ::fdatasync(fh) : ::fsync(fh));
}

int Session::release(int fh) {
  std::string path;
  {
    std::lock_guard lock(mu_);
    auto it = handles_.find(fh);
    if (it == handles_.end()) return -EBADF;
    path = it->second;
    handles_.erase(it);
  }
  hooks_.record(Primitive::Release, path);
  return neg_errno(::close(fh));
}

std::unique_ptr<Session> mount_session(const std::string& root, InjectionController* controller,
                                       const std::string& log_path) {
  return std::make_unique<Session>(root, controller, log_path);
}

}  // namespace faultfs::interpose
