// SPDX-License-Identifier: Apache-2.0
#pragma once

// Hook points shared by every front end (direct session, preload shim, FUSE
// adapter). A front end announces each call here, then forwards whatever
// the returned plan says to the backing store.

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "faultfs/common/bytes.hpp"
#include "faultfs/faultmodel/fault_model.hpp"
#include "faultfs/interpose/controller.hpp"
#include "faultfs/interpose/session_log.hpp"

namespace faultfs::interpose {

struct WritePlan {
  bool injected = false;
  Bytes faulty;      ///< owns the corrupted payload when injected
  ByteSpan forward;  ///< bytes to hand to the backing store
  std::uint64_t reported = 0;
};

struct ScalarPlan {
  bool injected = false;
  bool suppress = false;  ///< dropped: skip the call, report success
  std::vector<faultmodel::ScalarArg> args;
};

class Interposer {
 public:
  Interposer(InjectionController& controller, SessionLog& log)
      : controller_(controller), log_(log) {}

  /// Counts and logs a call that never carries a fault.
  void record(Primitive p, std::string_view path, std::vector<std::uint64_t> args = {},
              std::optional<std::uint64_t> offset = std::nullopt,
              std::optional<std::uint64_t> size = std::nullopt);

  WritePlan on_write(std::string_view path, std::uint64_t offset, ByteSpan payload);

  /// mknod (mode u32, dev u64) and chmod (mode u32).
  ScalarPlan on_scalar(Primitive p, std::string_view path,
                       std::vector<faultmodel::ScalarArg> args);

  InjectionController& controller() { return controller_; }

 private:
  LogRecord start(Primitive p, std::string_view path, const Ticket& t) const;

  InjectionController& controller_;
  SessionLog& log_;
};

}  // namespace faultfs::interpose
