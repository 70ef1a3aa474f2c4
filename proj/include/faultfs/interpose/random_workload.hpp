// SPDX-License-Identifier: Apache-2.0
#pragma once

// Seeded sequences of create/write/truncate/chmod used to check that the
// interposition layer is transparent. The same sequence can be replayed
// with raw syscalls (optionally under the preload shim) or through a
// Session, and the resulting trees compared.

#include <sys/types.h>

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "faultfs/common/bytes.hpp"
#include "faultfs/interpose/session.hpp"

namespace faultfs::interpose {

enum class FsOpKind : std::uint8_t { Mkdir, Create, Write, Truncate, Chmod };

struct FsOp {
  FsOpKind kind = FsOpKind::Create;
  std::string path;  ///< relative to the workload root
  std::uint64_t offset = 0;
  std::uint64_t size = 0;
  mode_t mode = 0644;
  Bytes data;
};

std::vector<FsOp> generate_ops(std::uint64_t seed, std::size_t count);

/// Replays with plain POSIX calls under `dir`. Returns 0 or the first errno.
int run_ops_posix(const std::string& dir, const std::vector<FsOp>& ops);
int run_ops_session(Session& s, const std::vector<FsOp>& ops);

struct TreeEntry {
  mode_t mode = 0;  ///< type and permission bits
  Bytes content;    ///< regular files only

  friend bool operator==(const TreeEntry&, const TreeEntry&) = default;
};

/// Relative path -> entry, for everything below `root`.
std::map<std::string, TreeEntry> snapshot_tree(const std::string& root);

}  // namespace faultfs::interpose
