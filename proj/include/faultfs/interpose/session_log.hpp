// SPDX-License-Identifier: Apache-2.0
#pragma once

// Append-only newline-delimited JSON record of every interposed call. Each
// record is emitted with a single O_APPEND write, so records from several
// processes never interleave and a crashing workload loses nothing.

#include <cstdint>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "faultfs/interpose/controller.hpp"
#include "faultfs/interpose/primitive.hpp"

namespace faultfs::interpose {

struct LogRecord {
  std::uint64_t seq = 0;
  std::int64_t pid = 0;
  Primitive primitive = Primitive::Open;
  std::uint64_t index = 0;  ///< invocation index within the primitive
  std::string path;
  std::optional<std::uint64_t> offset;
  std::optional<std::uint64_t> size;
  std::vector<std::uint64_t> args;  ///< scalar arguments (mode, dev, length)
  std::uint64_t digest = 0;         ///< FNV-1a over path, args and payload
  bool injected = false;
  std::int64_t ts_ns = 0;
  std::optional<InjectionDetail> fault;

  std::string to_json_line() const;
  static LogRecord from_json_line(const std::string& line);
};

class SessionLog {
 public:
  /// Discards records (counting still happens in the controller).
  SessionLog() = default;
  /// Opens `path` for appending, creating it if needed. SetupError on failure.
  explicit SessionLog(const std::string& path);
  SessionLog(const SessionLog&) = delete;
  SessionLog& operator=(const SessionLog&) = delete;
  ~SessionLog();

  /// Starts appending to `path` (closing any previous file).
  void open(const std::string& path);

  bool enabled() const { return fd_ >= 0; }
  void append(const LogRecord& r);

  /// Reads a log file back, sorted by `seq`. Unparseable trailing lines
  /// (a writer killed mid-record) are skipped.
  static std::vector<LogRecord> read(const std::string& path);

 private:
  int fd_ = -1;
  std::mutex mu_;
};

std::int64_t now_ns();

}  // namespace faultfs::interpose
