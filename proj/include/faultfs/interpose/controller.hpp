// SPDX-License-Identifier: Apache-2.0
#pragma once

// Single-shot injection controller. Its state lives in a small POD block
// that can be placed in a shared file mapping, so that every process of a
// workload (and every FUSE request thread) sees one counter per primitive
// and one "fired" flag.

#include <array>
#include <atomic>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "faultfs/common/bytes.hpp"
#include "faultfs/faultmodel/fault_model.hpp"
#include "faultfs/interpose/primitive.hpp"

namespace faultfs::interpose {

/// Which fault, where, with which parameters and seed.
struct FaultSignature {
  faultmodel::FaultModel model;
  Primitive primitive = Primitive::Write;
  std::uint64_t rng_seed = 0;

  /// Throws ConfigError for model/primitive pairs that cannot be armed:
  /// only write, mknod and chmod carry faults, and shorn writes are
  /// defined over data buffers only.
  void validate() const;

  friend bool operator==(const FaultSignature& a, const FaultSignature& b) {
    return a.model.kind == b.model.kind && a.model.bitflip_n == b.model.bitflip_n &&
           a.model.shorn_keep_eighths == b.model.shorn_keep_eighths &&
           a.primitive == b.primitive && a.rng_seed == b.rng_seed;
  }
};

struct ControlBlock {
  static constexpr std::uint32_t kMagic = 0x46464331;  // "FFC1"

  std::uint32_t magic = kMagic;
  std::uint32_t armed = 0;
  std::uint8_t kind = 0;
  std::uint8_t primitive = 0;
  std::uint16_t reserved = 0;
  std::uint32_t bitflip_n = 2;
  std::uint32_t keep_eighths = 7;
  std::uint32_t reserved2 = 0;
  std::uint64_t target_index = 0;
  std::uint64_t rng_seed = 0;
  std::atomic<std::uint64_t> seq{0};
  std::atomic<std::uint32_t> fired{0};
  std::uint32_t reserved3 = 0;
  std::array<std::atomic<std::uint64_t>, kPrimitiveCount> counts{};
};

static_assert(std::atomic<std::uint64_t>::is_always_lock_free,
              "shared counters need lock-free 64-bit atomics");

/// Result of announcing one invocation to the controller.
struct Ticket {
  std::uint64_t index = 0;  ///< 0-based invocation index of this primitive
  std::uint64_t seq = 0;    ///< global order across all primitives
  bool fire = false;
};

class InjectionController {
 public:
  /// Private, heap-backed block (single process).
  InjectionController();
  /// Maps `path` shared; creates and zero-initializes it when `create`.
  static InjectionController open_shared(const std::string& path, bool create);

  InjectionController(InjectionController&&) noexcept;
  InjectionController& operator=(InjectionController&&) noexcept;
  InjectionController(const InjectionController&) = delete;
  InjectionController& operator=(const InjectionController&) = delete;
  ~InjectionController();

  /// Validates the signature (ConfigError) and arms for invocation `index`.
  void arm(const FaultSignature& sig, std::uint64_t index);
  void disarm();
  /// Resets counters and the fired flag; keeps the arming.
  void reset();

  bool armed() const;
  std::optional<FaultSignature> signature() const;
  std::uint64_t target_index() const;

  /// Counts one invocation; `fire` is true for exactly one caller overall.
  Ticket begin(Primitive p);

  bool fired() const;
  std::uint64_t count(Primitive p) const;
  std::array<std::uint64_t, kPrimitiveCount> counts() const;

 private:
  void release();

  ControlBlock* block_ = nullptr;
  bool mapped_ = false;
};

/// Parameters drawn when a fault fires; logged so that the corrupted extent
/// can be replayed offline.
struct InjectionDetail {
  std::uint64_t start_bit = 0;
  std::uint32_t n_bits = 0;
  std::uint64_t fault_point = 0;
  std::uint64_t fill_seed = 0;
};

/// Applies the signature's model to a write. Fault parameters are drawn
/// from a stream seeded only by the signature, so the outcome is a pure
/// function of (signature, op).
faultmodel::FaultedWrite inject_write(const FaultSignature& sig, const faultmodel::WriteOp& op,
                                      InjectionDetail& detail);

/// Bit flip over scalar arguments. Dropped calls are handled by the caller.
std::vector<faultmodel::ScalarArg> inject_scalar(const FaultSignature& sig,
                                                 const std::vector<faultmodel::ScalarArg>& args,
                                                 InjectionDetail& detail);

}  // namespace faultfs::interpose
