// SPDX-License-Identifier: Apache-2.0
#include "faultfs/interpose/interposer.hpp"

#include <unistd.h>

namespace faultfs::interpose {

using faultmodel::FaultKind;

LogRecord Interposer::start(Primitive p, std::string_view path, const Ticket& t) const {
  LogRecord r;
  r.seq = t.seq;
  r.pid = ::getpid();
  r.primitive = p;
  r.index = t.index;
  r.path = std::string(path);
  r.ts_ns = now_ns();
  return r;
}

void Interposer::record(Primitive p, std::string_view path, std::vector<std::uint64_t> args,
                        std::optional<std::uint64_t> offset, std::optional<std::uint64_t> size) {
  const Ticket t = controller_.begin(p);
  LogRecord r = start(p, path, t);
  r.offset = offset;
  r.size = size;
  r.args = std::move(args);
  std::uint64_t h = fnv1a64(path);
  for (std::uint64_t a : r.args) h = fnv1a64(ByteSpan(reinterpret_cast<const std::uint8_t*>(&a), 8), h);
  r.digest = h;
  log_.append(r);
}

WritePlan Interposer::on_write(std::string_view path, std::uint64_t offset, ByteSpan payload) {
  const Ticket t = controller_.begin(Primitive::Write);
  LogRecord r = start(Primitive::Write, path, t);
  r.offset = offset;
  r.size = payload.size();
  r.digest = fnv1a64(payload, fnv1a64(path));

  WritePlan plan;
  plan.forward = payload;
  plan.reported = payload.size();
  if (t.fire) {
    const auto sig = controller_.signature();
    InjectionDetail d;
    faultmodel::WriteOp op{std::string(path), offset, payload};
    auto faulted = inject_write(*sig, op, d);
    plan.injected = true;
    plan.faulty = std::move(faulted.effective_payload);
    plan.forward = plan.faulty;
    plan.reported = faulted.reported_size;
    r.injected = true;
    r.fault = d;
  }
  log_.append(r);
  return plan;
}

ScalarPlan Interposer::on_scalar(Primitive p, std::string_view path,
                                 std::vector<faultmodel::ScalarArg> args) {
  const Ticket t = controller_.begin(p);
  LogRecord r = start(p, path, t);
  std::uint64_t h = fnv1a64(path);
  for (const auto& a : args) {
    r.args.push_back(a.value);
    h = fnv1a64(ByteSpan(reinterpret_cast<const std::uint8_t*>(&a.value), 8), h);
  }
  r.digest = h;

  ScalarPlan plan;
  plan.args = std::move(args);
  if (t.fire) {
    const auto sig = controller_.signature();
    InjectionDetail d;
    plan.injected = true;
    if (sig->model.kind == FaultKind::DroppedWrite) {
      plan.suppress = true;
    } else {
      plan.args = inject_scalar(*sig, plan.args, d);
    }
    r.injected = true;
    r.fault = d;
  }
  log_.append(r);
  return plan;
}

}  // namespace faultfs::interpose
