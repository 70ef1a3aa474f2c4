// SPDX-License-Identifier: Apache-2.0
#include "faultfs/interpose/controller.hpp"

#include <fcntl.h>
#include <sys/mman.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <cstring>
#include <new>
#include <utility>

#include "faultfs/common/error.hpp"
#include "faultfs/common/random.hpp"

namespace faultfs::interpose {

using faultmodel::FaultKind;

void FaultSignature::validate() const {
  model.validate();
  switch (primitive) {
    case Primitive::Write:
      return;
    case Primitive::Mknod:
    case Primitive::Chmod:
      if (model.kind == FaultKind::ShornWrite) {
        throw ConfigError("ShornWrite is only defined for write, not " +
                          std::string(to_string(primitive)));
      }
      return;
    default:
      throw ConfigError("primitive " + std::string(to_string(primitive)) +
                        " cannot carry a fault (supported: write, mknod, chmod)");
  }
}

InjectionController::InjectionController() : block_(new ControlBlock()) {}

InjectionController InjectionController::open_shared(const std::string& path, bool create) {
  const int fd = ::open(path.c_str(), O_RDWR | O_CLOEXEC | (create ? O_CREAT | O_TRUNC : 0), 0600);
  if (fd < 0) throw SetupError("cannot open control block " + path + ": " + std::strerror(errno));
  if (create && ::ftruncate(fd, sizeof(ControlBlock)) != 0) {
    const int e = errno;
    ::close(fd);
    throw SetupError("cannot size control block " + path + ": " + std::strerror(e));
  }
  void* p = ::mmap(nullptr, sizeof(ControlBlock), PROT_READ | PROT_WRITE, MAP_SHARED, fd, 0);
  const int e = errno;
  ::close(fd);
  if (p == MAP_FAILED) throw SetupError("cannot map control block " + path + ": " + std::strerror(e));
  InjectionController c;
  delete c.block_;
  c.mapped_ = true;
  if (create) {
    c.block_ = new (p) ControlBlock();
  } else {
    c.block_ = static_cast<ControlBlock*>(p);
    if (c.block_->magic != ControlBlock::kMagic) {
      ::munmap(p, sizeof(ControlBlock));
      c.block_ = nullptr;
      throw SetupError("control block " + path + " has a bad magic number");
    }
  }
  return c;
}

InjectionController::InjectionController(InjectionController&& o) noexcept
    : block_(std::exchange(o.block_, nullptr)), mapped_(o.mapped_) {}

InjectionController& InjectionController::operator=(InjectionController&& o) noexcept {
  if (this != &o) {
    release();
    block_ = std::exchange(o.block_, nullptr);
    mapped_ = o.mapped_;
  }
  return *this;
}

InjectionController::~InjectionController() { release(); }

void InjectionController::release() {
  if (!block_) return;
  if (mapped_) {
    ::munmap(block_, sizeof(ControlBlock));
  } else {
    delete block_;
  }
  block_ = nullptr;
}

void InjectionController::arm(const FaultSignature& sig, std::uint64_t index) {
  sig.validate();
  block_->kind = static_cast<std::uint8_t>(sig.model.kind);
  block_->primitive = static_cast<std::uint8_t>(sig.primitive);
  block_->bitflip_n = sig.model.bitflip_n;
  block_->keep_eighths = sig.model.shorn_keep_eighths;
  block_->target_index = index;
  block_->rng_seed = sig.rng_seed;
  std::atomic_thread_fence(std::memory_order_release);
  block_->armed = 1;
}

void InjectionController::disarm() { block_->armed = 0; }

void InjectionController::reset() {
  for (auto& c : block_->counts) c.store(0);
  block_->seq.store(0);
  block_->fired.store(0);
}

bool InjectionController::armed() const { return block_->armed != 0; }

std::optional<FaultSignature> InjectionController::signature() const {
  if (!armed()) return std::nullopt;
  FaultSignature s;
  s.model.kind = static_cast<FaultKind>(block_->kind);
  s.model.bitflip_n = block_->bitflip_n;
  s.model.shorn_keep_eighths = block_->keep_eighths;
  s.primitive = static_cast<Primitive>(block_->primitive);
  s.rng_seed = block_->rng_seed;
  return s;
}

std::uint64_t InjectionController::target_index() const { return block_->target_index; }

Ticket InjectionController::begin(Primitive p) {
  Ticket t;
  t.seq = block_->seq.fetch_add(1);
  t.index = block_->counts[static_cast<std::size_t>(p)].fetch_add(1);
  if (block_->armed && block_->primitive == static_cast<std::uint8_t>(p) &&
      t.index == block_->target_index) {
    std::uint32_t expected = 0;
    t.fire = block_->fired.compare_exchange_strong(expected, 1);
  }
  return t;
}

bool InjectionController::fired() const { return block_->fired.load() != 0; }

std::uint64_t InjectionController::count(Primitive p) const {
  return block_->counts[static_cast<std::size_t>(p)].load();
}

std::array<std::uint64_t, kPrimitiveCount> InjectionController::counts() const {
  std::array<std::uint64_t, kPrimitiveCount> out{};
  for (std::size_t i = 0; i < kPrimitiveCount; ++i) out[i] = block_->counts[i].load();
  return out;
}

namespace {

// Fault parameters come from their own stream so that the signature seed
// alone fixes them.
Rng fault_rng(const FaultSignature& sig) { return Rng(mix_seed(sig.rng_seed, 0x6661756c74ULL)); }

}  // namespace

faultmodel::FaultedWrite inject_write(const FaultSignature& sig, const faultmodel::WriteOp& op,
                                      InjectionDetail& detail) {
  const std::uint64_t size = op.declared_size();
  Rng rng = fault_rng(sig);
  switch (sig.model.kind) {
    case FaultKind::DroppedWrite:
      return faultmodel::apply_dropped_write(op);
    case FaultKind::BitFlip: {
      if (size == 0) return {{}, 0};
      const std::uint64_t bits = 8 * size;
      detail.n_bits = static_cast<std::uint32_t>(std::min<std::uint64_t>(sig.model.bitflip_n, bits));
      detail.start_bit = uniform_index(rng, bits - detail.n_bits + 1);
      return faultmodel::apply_bit_flip(op, detail.start_bit, detail.n_bits);
    }
    case FaultKind::ShornWrite: {
      if (size == 0) return {{}, 0};
      detail.fault_point = uniform_index(rng, size);
      detail.fill_seed = rng();
      return faultmodel::apply_shorn_write(op, sig.model, detail.fill_seed, detail.fault_point);
    }
  }
  return {Bytes(op.payload.begin(), op.payload.end()), size};
}

std::vector<faultmodel::ScalarArg> inject_scalar(const FaultSignature& sig,
                                                 const std::vector<faultmodel::ScalarArg>& args,
                                                 InjectionDetail& detail) {
  const std::uint64_t bits = faultmodel::scalar_bit_count(args);
  if (sig.model.kind != FaultKind::BitFlip || bits == 0) return args;
  Rng rng = fault_rng(sig);
  detail.n_bits = static_cast<std::uint32_t>(std::min<std::uint64_t>(sig.model.bitflip_n, bits));
  detail.start_bit = uniform_index(rng, bits - detail.n_bits + 1);
  return faultmodel::corrupt_scalar_args(args, detail.start_bit, detail.n_bits);
}

}  // namespace faultfs::interpose
