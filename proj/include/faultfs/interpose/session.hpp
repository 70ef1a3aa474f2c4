// SPDX-License-Identifier: Apache-2.0
#pragma once

// In-process passthrough over a backing root directory. Paths are relative
// to the root (a leading '/' is ignored). Calls return 0 / a byte count /
// a handle on success and -errno on failure, like the FUSE callbacks they
// back.

#include <sys/stat.h>
#include <sys/types.h>

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <vector>

#include "faultfs/common/bytes.hpp"
#include "faultfs/interpose/controller.hpp"
#include "faultfs/interpose/interposer.hpp"
#include "faultfs/interpose/session_log.hpp"

namespace faultfs::interpose {

class Session {
 public:
  /// `controller` may be null: the session then only profiles. An empty
  /// `log_path` disables the record file. Throws SetupError when the root
  /// is missing or not writable.
  Session(const std::string& root, InjectionController* controller, const std::string& log_path = {});
  Session(const Session&) = delete;
  Session& operator=(const Session&) = delete;
  ~Session();

  int open(const std::string& path, int flags);
  int create(const std::string& path, int flags, mode_t mode);
  ssize_t read(int fh, std::span<std::uint8_t> buf, std::uint64_t offset);
  ssize_t write(int fh, ByteSpan data, std::uint64_t offset);
  int truncate(const std::string& path, std::uint64_t size);
  int mknod(const std::string& path, mode_t mode, dev_t dev);
  int chmod(const std::string& path, mode_t mode);
  int unlink(const std::string& path);
  int rename(const std::string& from, const std::string& to);
  int getattr(const std::string& path, struct stat& st);
  int readdir(const std::string& path, std::vector<std::string>& names);
  int mkdir(const std::string& path, mode_t mode);
  int rmdir(const std::string& path);
  int fsync(int fh, bool datasync);
  int release(int fh);

  const std::string& root() const { return root_; }
  InjectionController& controller() { return *controller_; }

 private:
  std::string handle_path(int fh);

  std::string root_;
  int root_fd_ = -1;
  std::unique_ptr<InjectionController> owned_;
  InjectionController* controller_ = nullptr;
  SessionLog log_;
  Interposer hooks_;
  std::mutex mu_;
  std::map<int, std::string> handles_;
};

/// Opens a session over `root`; teardown (destruction) closes all handles.
std::unique_ptr<Session> mount_session(const std::string& root, InjectionController* controller,
                                       const std::string& log_path = {});

}  // namespace faultfs::interpose
