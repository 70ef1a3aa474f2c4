// SPDX-License-Identifier: Apache-2.0
#include "faultfs/interpose/session_log.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <chrono>
#include <cstring>
#include <fstream>

#include "faultfs/common/error.hpp"
#include "json.hpp"

namespace faultfs::interpose {

using nlohmann::ordered_json;

std::int64_t now_ns() {
  return std::chrono::duration_cast<std::chrono::nanoseconds>(
             std::chrono::system_clock::now().time_since_epoch())
      .count();
}

std::string LogRecord::to_json_line() const {
  ordered_json j;
  j["seq"] = seq;
  j["pid"] = pid;
  j["primitive"] = std::string(to_string(primitive));
  j["index"] = index;
  j["path"] = path;
  if (offset) j["offset"] = *offset;
  if (size) j["size"] = *size;
  if (!args.empty()) j["args"] = args;
  char hex[17];
  std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(digest));
  j["digest"] = hex;
  j["injected"] = injected;
  j["ts_ns"] = ts_ns;
  if (fault) {
    j["fault"] = {{"start_bit", fault->start_bit},
                  {"n_bits", fault->n_bits},
                  {"fault_point", fault->fault_point},
                  {"fill_seed", fault->fill_seed}};
  }
  // Invalid UTF-8 in paths is replaced rather than aborting the workload.
  return j.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace) + "\n";
}

LogRecord LogRecord::from_json_line(const std::string& line) {
  const auto j = ordered_json::parse(line);
  LogRecord r;
  r.seq = j.at("seq").get<std::uint64_t>();
  r.pid = j.at("pid").get<std::int64_t>();
  const auto p = parse_primitive(j.at("primitive").get<std::string>());
  if (!p) throw std::invalid_argument("unknown primitive in log record");
  r.primitive = *p;
  r.index = j.at("index").get<std::uint64_t>();
  r.path = j.at("path").get<std::string>();
  if (j.contains("offset")) r.offset = j["offset"].get<std::uint64_t>();
  if (j.contains("size")) r.size = j["size"].get<std::uint64_t>();
  if (j.contains("args")) r.args = j["args"].get<std::vector<std::uint64_t>>();
  r.digest = std::stoull(j.at("digest").get<std::string>(), nullptr, 16);
  r.injected = j.at("injected").get<bool>();
  r.ts_ns = j.at("ts_ns").get<std::int64_t>();
  if (j.contains("fault")) {
    const auto& f = j["fault"];
    r.fault = InjectionDetail{f.at("start_bit").get<std::uint64_t>(),
                              f.at("n_bits").get<std::uint32_t>(),
                              f.at("fault_point").get<std::uint64_t>(),
                              f.at("fill_seed").get<std::uint64_t>()};
  }
  return r;
}

SessionLog::SessionLog(const std::string& path) { open(path); }

void SessionLog::open(const std::string& path) {
  if (fd_ >= 0) ::close(fd_);
  fd_ = ::open(path.c_str(), O_WRONLY | O_CREAT | O_APPEND | O_CLOEXEC, 0644);
  if (fd_ < 0) throw SetupError("cannot open session log " + path + ": " + std::strerror(errno));
}

SessionLog::~SessionLog() {
  if (fd_ >= 0) ::close(fd_);
}

void SessionLog::append(const LogRecord& r) {
  if (fd_ < 0) return;
  const std::string line = r.to_json_line();
  std::lock_guard lock(mu_);
  const char* p = line.data();
  std::size_t left = line.size();
  while (left > 0) {
    const ssize_t n = ::write(fd_, p, left);
    if (n < 0) {
      if (errno == EINTR) continue;
      return;  // the log must never break the workload
    }
    p += n;
    left -= static_cast<std::size_t>(n);
  }
}

std::vector<LogRecord> SessionLog::read(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SetupError("cannot read session log " + path);
  std::vector<LogRecord> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    try {
      out.push_back(LogRecord::from_json_line(line));
    } catch (const std::exception&) {
      // torn final record
    }
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const LogRecord& a, const LogRecord& b) { return a.seq < b.seq; });
  return out;
}

}  // namespace faultfs::interpose
