// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace faultfs {

/// Invalid user configuration (bad JSON, unsupported model/primitive pair).
/// The CLI maps this to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A caller broke an operation's precondition. Signals harness
/// misconfiguration rather than a property of the system under test.
class PreconditionError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Environment could not be prepared (missing root, mount refused, ...).
class SetupError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A campaign cannot continue (golden run failed, too many no-fire runs).
class CampaignError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace faultfs
