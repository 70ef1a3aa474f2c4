// SPDX-License-Identifier: Apache-2.0
#include "faultfs/hdf5/sweep.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <ostream>
#include <thread>

namespace faultfs::hdf5 {

namespace {

void run_range(ByteSpan file, const FieldMap& map, const ClassifyFn& classify,
               const SweepOptions& opts, std::uint64_t begin, std::uint64_t end,
               std::vector<SweepRecord>& out) {
  Bytes copy(file.begin(), file.end());
  const unsigned bits = opts.per_bit ? 8 : 1;
  for (std::uint64_t off = begin; off < end; ++off) {
    const FieldSpan& f = map.at(off);
    for (unsigned b = 0; b < bits; ++b) {
      SweepRecord r{off, b, f.name, f.role, OutcomeClass::Crash, {}};
      copy[off] ^= static_cast<std::uint8_t>(1u << b);
      try {
        r.outcome = classify(copy);
      } catch (const std::exception& e) {
        r.detail = e.what();
      } catch (...) {
        r.detail = "unknown failure";
      }
      copy[off] = file[off];
      out.push_back(std::move(r));
    }
  }
}

}  // namespace

std::vector<SweepRecord> sweep_metadata(ByteSpan file, const FieldMap& map,
                                        const ClassifyFn& classify, const SweepOptions& opts) {
  const std::uint64_t n = std::min<std::uint64_t>(map.size, file.size());
  const unsigned threads = std::max(1u, std::min<unsigned>(opts.threads, static_cast<unsigned>(n)));
  std::vector<std::vector<SweepRecord>> parts(threads);
  if (threads == 1) {
    run_range(file, map, classify, opts, 0, n, parts[0]);
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) {
      pool.emplace_back([&, t] {
        run_range(file, map, classify, opts, n * t / threads, n * (t + 1) / threads, parts[t]);
      });
    }
    for (auto& th : pool) th.join();
  }
  std::vector<SweepRecord> all;
  for (auto& p : parts) std::move(p.begin(), p.end(), std::back_inserter(all));
  return all;
}

std::vector<SweepSummaryRow> summarize_sweep(const std::vector<SweepRecord>& records) {
  std::vector<SweepSummaryRow> rows;
  std::map<std::string, std::size_t> index;
  for (const SweepRecord& r : records) {
    auto [it, fresh] = index.try_emplace(r.field, rows.size());
    if (fresh) rows.push_back({r.field, r.role, 0, {}});
    SweepSummaryRow& row = rows[it->second];
    ++row.injections;
    ++row.counts[static_cast<std::size_t>(r.outcome)];
  }
  return rows;
}

void write_sweep_csv(std::ostream& os, const std::vector<SweepRecord>& records) {
  os << "offset,bit,field,role,class\n";
  for (const SweepRecord& r : records) {
    os << r.offset << ',' << r.bit << ',' << r.field << ',' << to_string(r.role) << ','
       << to_string(r.outcome) << '\n';
  }
}

void write_sweep_summary(std::ostream& os, const std::vector<SweepRecord>& records) {
  const auto rows = summarize_sweep(records);
  std::array<std::uint64_t, 4> total{};
  os << "field,role,injections,benign,detected,sdc,crash\n";
  for (const SweepSummaryRow& r : rows) {
    os << r.field << ',' << to_string(r.role) << ',' << r.injections;
    for (std::size_t c = 0; c < 4; ++c) {
      os << ',' << r.counts[c];
      total[c] += r.counts[c];
    }
    os << '\n';
  }
  const double n = static_cast<double>(records.size());
  os << "TOTAL,," << records.size();
  for (auto c : total) os << ',' << c;
  os << '\n';
  char buf[64];
  os << "PERCENT,,100";
  for (auto c : total) {
    std::snprintf(buf, sizeof buf, ",%.1f", n > 0 ? 100.0 * static_cast<double>(c) / n : 0.0);
    os << buf;
  }
  os << '\n';
}

}  // namespace faultfs::hdf5
