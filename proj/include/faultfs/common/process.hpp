// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace faultfs {

struct ProcessSpec {
  std::vector<std::string> argv;
  std::string cwd;                           ///< empty: inherit
  std::map<std::string, std::string> env;    ///< added to / overriding the parent's
  std::vector<std::string> unset_env;
  std::string stdout_path;                   ///< empty: /dev/null
  std::string stderr_path;                   ///< empty: /dev/null
  double timeout_s = 0;                      ///< 0: no limit
};

struct ProcessResult {
  int exit_code = -1;
  int term_signal = 0;
  bool timed_out = false;
  double seconds = 0;

  bool ok() const { return exit_code == 0 && term_signal == 0 && !timed_out; }
};

/// Spawns argv[0] (PATH lookup) in its own process group and waits. On
/// timeout the whole group is killed. Throws SetupError when the program
/// cannot be started at all.
ProcessResult run_process(const ProcessSpec& spec);

/// Directory holding the running executable.
std::string self_exe_dir();

}  // namespace faultfs
