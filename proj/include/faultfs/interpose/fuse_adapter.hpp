// SPDX-License-Identifier: Apache-2.0
#pragma once

// Serves a Session at a real mountpoint by speaking the FUSE kernel
// protocol on /dev/fuse directly, so unmodified binaries (cp, dd, shells)
// run through the hooks. Needs CAP_SYS_ADMIN for mount(2).

#include <atomic>
#include <string>
#include <thread>
#include <vector>

#include "faultfs/interpose/session.hpp"

namespace faultfs::interpose {

class FuseMount {
 public:
  /// Mounts and starts `threads` request handlers. SetupError (with a
  /// remediation hint) when /dev/fuse or mount(2) is unavailable.
  FuseMount(Session& session, const std::string& mountpoint, unsigned threads = 2);
  FuseMount(const FuseMount&) = delete;
  FuseMount& operator=(const FuseMount&) = delete;
  /// Unmounts and joins the handlers.
  ~FuseMount();

  const std::string& mountpoint() const { return mountpoint_; }

  /// True when a mount can be attempted here; `why` explains otherwise.
  static bool available(std::string* why = nullptr);

 private:
  void serve();

  Session& session_;
  std::string mountpoint_;
  int fd_ = -1;
  std::atomic<bool> stopping_{false};
  std::vector<std::thread> workers_;
  struct State;
  State* state_ = nullptr;
};

}  // namespace faultfs::interpose
