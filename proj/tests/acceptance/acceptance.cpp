// SPDX-License-Identifier: Apache-2.0
//
// Acceptance gate: one PASS/FAIL line per criterion, each against its own
// oracle and time budget. Exit status is the number of failed criteria.

#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "faultfs/campaign/campaign.hpp"
#include "faultfs/campaign/stats.hpp"
#include "faultfs/classify/halo_finder.hpp"
#include "faultfs/classify/toy.hpp"
#include "faultfs/common/process.hpp"
#include "faultfs/faultmodel/fault_model.hpp"
#include "faultfs/hdf5/field_map.hpp"
#include "faultfs/hdf5/parser.hpp"
#include "faultfs/hdf5/repair.hpp"
#include "faultfs/hdf5/sweep.hpp"
#include "faultfs/hdf5/writer.hpp"
#include "faultfs/interpose/random_workload.hpp"
#include "faultfs/interpose/session.hpp"
#include "helpers/fixtures.hpp"
#include "helpers/tempdir.hpp"
#include "helpers/toy_campaign.hpp"

using namespace faultfs;
using fixtures::TempDir;

namespace {

struct Check {
  bool ok = true;
  std::ostringstream why;

  // Records the first few failures; later ones only flip the verdict.
  bool require(bool cond, const std::string& what) {
    if (!cond) {
      if (ok || why.tellp() < 400) why << (ok ? "" : "; ") << what;
      ok = false;
    }
    return cond;
  }
};

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

int failures = 0;

void report(int id, const std::string& title, Check& c, double seconds, double budget, const std::string& detail) {
  const bool in_time = budget <= 0 || seconds < budget;
  const bool pass = c.ok && in_time;
  failures += !pass;
  std::printf("criterion %d %s  %s: %s (%.2f s", id, pass ? "PASS" : "FAIL", title.c_str(), detail.c_str(), seconds);
  if (budget > 0) std::printf(", budget %.0f s", budget);
  std::printf(")\n");
  if (!c.ok) std::printf("    %s\n", c.why.str().c_str());
  if (!in_time) std::printf("    over time budget\n");
  std::fflush(stdout);
}

Bytes random_bytes(std::mt19937_64& rng, std::size_t n) {
  Bytes b(n);
  for (auto& x : b) x = static_cast<std::uint8_t>(rng());
  return b;
}

// ---- 1 ----------------------------------------------------------------

void fault_models() {
  using namespace faultmodel;
  Check c;
  const auto t0 = Clock::now();
  std::mt19937_64 rng(1);
  int cases = 0;
  for (int t = 0; t < 1000; ++t, ++cases) {
    const Bytes p = random_bytes(rng, 1 + rng() % 256);
    const std::uint32_t n = 1 + rng() % std::min<std::uint64_t>(64, 8 * p.size());
    const std::uint64_t s = rng() % (8 * p.size() - n + 1);
    const auto once = apply_bit_flip({"f", 0, p}, s, n);
    // Bit-by-bit oracle: exactly the n chosen bits differ.
    std::uint64_t diff = 0;
    bool inside = true;
    for (std::size_t k = 0; k < 8 * p.size(); ++k) {
      const bool d = ((p[k / 8] ^ once.effective_payload[k / 8]) >> (k % 8)) & 1;
      diff += d;
      if (d && (k < s || k >= s + n)) inside = false;
    }
    c.require(diff == n && inside, "bit flip touched the wrong bits");
    c.require(apply_bit_flip({"f", 0, once.effective_payload}, s, n).effective_payload == p, "bit flip not an involution");
    c.require(once.reported_size == p.size(), "bit flip changed the reported size");
  }
  for (int t = 0; t < 1000; ++t, ++cases) {
    const Bytes p = random_bytes(rng, 1 + rng() % 20000);
    FaultModel m{FaultKind::ShornWrite, 2, static_cast<std::uint32_t>(1 + rng() % 7)};
    const std::uint64_t fp = rng() % p.size();
    const auto out = apply_shorn_write({"f", rng() % 65536, p}, m, rng(), fp);
    const std::size_t begin = fp / 4096 * 4096;
    const std::size_t len = std::min<std::size_t>(4096, p.size() - begin);
    const std::size_t keep = (m.shorn_keep_eighths * len + 7) / 8;
    bool prefix = out.effective_payload.size() == p.size();
    for (std::size_t i = 0; prefix && i < p.size(); ++i) {
      if (i < begin + keep || i >= begin + len) prefix = out.effective_payload[i] == p[i];
    }
    c.require(prefix, "shorn write altered bytes outside the torn tail");
    c.require(out.reported_size == p.size(), "shorn write changed the reported size");
  }
  for (int t = 0; t < 1000; ++t, ++cases) {
    Bytes store = random_bytes(rng, rng() % 8192);
    const Bytes before = store;
    const Bytes p = random_bytes(rng, 1 + rng() % 4096);
    const std::uint64_t off = rng() % (store.size() + 1);
    const auto out = apply_dropped_write({"f", off, p});
    // Apply what reaches the store the way pwrite would.
    if (!out.effective_payload.empty()) {
      if (store.size() < off + out.effective_payload.size()) store.resize(off + out.effective_payload.size());
      std::copy(out.effective_payload.begin(), out.effective_payload.end(), store.begin() + off);
    }
    c.require(store == before, "dropped write changed the store");
    c.require(out.reported_size == p.size(), "dropped write did not report full success");
  }
  report(1, "fault-model fidelity", c, since(t0), 10, std::to_string(cases) + " randomized cases");
}

// ---- 2 ----------------------------------------------------------------

void transparency() {
  using namespace interpose;
  Check c;
  const auto t0 = Clock::now();
  const std::string bin = self_exe_dir();
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    TempDir direct, session_root, preload_root;
    const auto ops = generate_ops(seed, 60);
    c.require(run_ops_posix(direct.path(), ops) == 0, "direct replay failed");
    {
      Session s(session_root.path(), nullptr);
      c.require(run_ops_session(s, ops) == 0, "session replay failed");
    }
    ProcessSpec spec;
    spec.argv = {bin + "/faultfs-io-workload", "random", "--dir", preload_root.path(), "--seed",
                 std::to_string(seed), "--ops", "60"};
    spec.env = {{"LD_PRELOAD", bin + "/libfaultfs_preload.so"},
                {"FAULTFS_ROOT", preload_root.path()},
                {"FAULTFS_LOG", "/dev/null"}};
    spec.timeout_s = 30;
    c.require(run_process(spec).ok(), "preloaded replay failed");
    const auto want = snapshot_tree(direct.path());
    c.require(snapshot_tree(session_root.path()) == want, "session tree differs, seed " + std::to_string(seed));
    c.require(snapshot_tree(preload_root.path()) == want, "preload tree differs, seed " + std::to_string(seed));
  }
  report(2, "transparency", c, since(t0), 0, "50 workloads x {session, preload} bit-identical to direct");
}

// ---- 3 ----------------------------------------------------------------

// Upper tail of chi-square from the incomplete gamma series.
double chi_square_tail(double x, double df) {
  const double a = df / 2, z = x / 2;
  double term = 1.0 / a, sum = term;
  for (int k = 1; k < 2000; ++k) sum += (term *= z / (a + k));
  return 1.0 - std::exp(a * std::log(z) - z - std::lgamma(a)) * sum;
}

void uniformity() {
  Check c;
  const auto t0 = Clock::now();
  TempDir dir;
  const auto cfg = fixtures::toy_config("DroppedWrite", 1, dir.path());
  std::array<std::uint64_t, 10> hist{};
  for (std::uint64_t id = 0; id < 100000; ++id) ++hist[campaign::target_for(campaign::generate_signature(cfg, id), 10, 0)];
  const double stat = campaign::chi_square_uniform_statistic(hist);
  const double crit = campaign::chi_square_critical(9, 0.001);
  c.require(std::fabs(chi_square_tail(crit, 9) - 0.001) < 1e-8, "critical value disagrees with series oracle");
  c.require(stat < crit, "indices not uniform");
  char buf[128];
  std::snprintf(buf, sizeof buf, "chi2 = %.2f < %.3f (df 9, alpha 0.001), p = %.3f", stat, crit, chi_square_tail(stat, 9));
  report(3, "injector uniformity", c, since(t0), 0, buf);
}

// ---- 4 ----------------------------------------------------------------

double binom_cdf(std::uint64_t n, std::uint64_t k, double p) {
  double s = 0;
  for (std::uint64_t i = 0; i <= k; ++i) {
    s += std::exp(std::lgamma(n + 1.0) - std::lgamma(i + 1.0) - std::lgamma(n - i + 1.0) + i * std::log(p) +
                  (n - i) * std::log1p(-p));
  }
  return s;
}

double bisect(const std::function<double(double)>& f) {
  double lo = 1e-12, hi = 1 - 1e-12;
  const bool rising = f(hi) > f(lo);
  for (int i = 0; i < 100; ++i) {
    const double mid = 0.5 * (lo + hi);
    ((f(mid) > 0) == rising ? hi : lo) = mid;
  }
  return 0.5 * (lo + hi);
}

void intervals() {
  Check c;
  const auto t0 = Clock::now();
  double worst = 0;
  for (std::uint64_t k : {0, 2, 20, 500}) {
    const auto w = campaign::wilson_interval(k, 1000);
    const double lo = k == 0 ? 0.0 : bisect([&](double p) { return 1 - binom_cdf(1000, k - 1, p) - 0.025; });
    const double hi = bisect([&](double p) { return binom_cdf(1000, k, p) - 0.025; });
    worst = std::max({worst, std::fabs(w.lo - lo), std::fabs(w.hi - hi)});
  }
  c.require(worst <= 0.005, "Wilson differs from exact binomial by more than 0.5 pp");
  double sum = 0, widest = 0;
  for (std::uint64_t k = 1; k <= 150; ++k) {
    const auto w = campaign::wilson_interval(k, 1000);
    sum += (w.hi - w.lo) / 2;
    widest = std::max(widest, (w.hi - w.lo) / 2);
  }
  const double mean = sum / 150;
  c.require(mean >= 0.01 && mean <= 0.02, "average error bar outside 1-2%");
  char buf[160];
  std::snprintf(buf, sizeof buf,
                "max |Wilson - exact| = %.2f pp; mean half-width over rates <= 15%% = %.2f%% (widest %.2f%%)",
                100 * worst, 100 * mean, 100 * widest);
  report(4, "confidence intervals", c, since(t0), 1, buf);
}

// ---- 5 ----------------------------------------------------------------

void hdf5_round_trip() {
  Check c;
  const auto t0 = Clock::now();
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1e6, 1e6);
  for (int t = 0; t < 200; ++t) {
    DensityGrid g(1 + rng() % 16, 1 + rng() % 16, 1 + rng() % 16);
    const auto p = t % 2 ? hdf5::Precision::F32 : hdf5::Precision::F64;
    for (double& x : g.cells) x = p == hdf5::Precision::F32 ? static_cast<float>(u(rng)) : u(rng);
    const auto f = hdf5::write_dataset(g, p);
    const auto back = hdf5::read_dataset(f.bytes);
    bool same = back.dims == g.dims && back.size() == g.size();
    for (std::size_t i = 0; same && i < g.size(); ++i) {
      same = std::bit_cast<std::uint64_t>(back.cells[i]) == std::bit_cast<std::uint64_t>(g.cells[i]);
    }
    c.require(same, "grid " + std::to_string(t) + " did not round trip");
  }
  report(5, "HDF5 round trip", c, since(t0), 0, "200 grids <= 16^3, f32/f64, bit-exact");
}

// ---- 6 ----------------------------------------------------------------

Bytes with_field(const Bytes& file, const std::string& field, std::int64_t delta) {
  Bytes b = file;
  const auto m = hdf5::parse_file(b);
  const auto& s = m.field(field);
  const std::uint64_t v = load_le(ByteSpan(b).subspan(s.offset), s.length);
  store_le(std::span(b).subspan(s.offset), v + static_cast<std::uint64_t>(delta), s.length);
  return b;
}

hdf5::Diagnosis diagnose_bytes(const Bytes& b) {
  const auto m = hdf5::parse_file(b);
  return hdf5::diagnose(m, {hdf5::read_dataset(b, m).mean()});
}

void repair_suite() {
  using hdf5::DiagnosisKind;
  const Bytes golden = fixtures::fixture_file().bytes;
  const auto golden_grid = hdf5::read_dataset(golden);
  const auto params = fixtures::fixture_params();
  std::vector<std::string> parts;
  Check c;
  double slowest = 0;
  auto timed = [&](const std::function<void()>& f) {
    const auto t0 = Clock::now();
    f();
    slowest = std::max(slowest, since(t0));
  };

  timed([&] {
    Bytes b = with_field(golden, "datatype.exponent_bias", 0x3F3 - 0x3FF);
    const double mean = hdf5::read_dataset(b).mean();
    c.require(std::fabs(mean - 4096.0) < 4096.0 * 1e-9, "6a: decoded mean is not 4096");
    const auto d = diagnose_bytes(b);
    c.require(d.kind == DiagnosisKind::ExponentBiasFault && d.log2_scale == 12, "6a: not diagnosed as exponent bias");
    const auto r = hdf5::auto_repair(b);
    c.require(r.applied && hdf5::parse_file(b).dtype.exponent_bias == 0x3FF, "6a: bias not restored");
    c.require(std::fabs(hdf5::read_dataset(b).mean() - 1.0) < 1e-12, "6a: mean not restored");
    parts.push_back("a");
  });

  timed([&] {
    for (const char* f : {"datatype.mantissa_size", "datatype.exponent_location", "datatype.exponent_size"}) {
      for (int delta : {-1, 1}) {
        Bytes b = with_field(golden, f, delta);
        const auto m = hdf5::parse_file(b);
        c.require(!m.dtype.layout_consistent(), std::string("6b: ") + f + " still consistent");
        hdf5::Diagnosis d;
        try {
          d = diagnose_bytes(b);
        } catch (const std::exception&) {
          // Undecodable data leaves only the layout constraints to go on.
          d = hdf5::diagnose(m, {NAN});
        }
        c.require(d.kind == DiagnosisKind::FpLayoutFault, std::string("6b: ") + f + " not an FP layout fault");
        const auto r = hdf5::auto_repair(b);
        c.require(r.applied, std::string("6b: ") + f + " not repaired: " + r.error);
        c.require(hdf5::read_dataset(b) == golden_grid, std::string("6b: ") + f + " decode differs after repair");
      }
    }
    parts.push_back("b");
  });

  timed([&] {
    Bytes b = golden;
    const auto m = hdf5::parse_file(b);
    hdf5::patch_ard(b, m, m.layout.address + 64);
    const auto shifted = hdf5::read_dataset(b);
    const auto h0 = classify::halo_finder(golden_grid, params.threshold, params.min_cells);
    const auto h1 = classify::halo_finder(shifted, params.threshold, params.min_cells);
    bool masses = h0.size() == h1.size() && !h0.empty(), moved = masses;
    for (std::size_t i = 0; masses && i < h0.size(); ++i) {
      masses = h0[i].mass == h1[i].mass;
      moved = moved && h0[i].centroid != h1[i].centroid;
    }
    c.require(masses, "6c: halo masses changed");
    c.require(moved, "6c: halo locations did not shift");
    c.require(std::fabs(shifted.mean() - 1.0) < 0.05, "6c: grid mean not ~1");
    const auto sm = hdf5::parse_file(b);
    c.require(hdf5::diagnose(sm, {shifted.mean()}).kind == DiagnosisKind::ArdFault, "6c: not diagnosed as ARD");
    // Without the address check the same data would not be called an ARD fault.
    auto blind = sm;
    blind.metadata_size = blind.layout.address;
    c.require(hdf5::diagnose(blind, {shifted.mean()}).kind != DiagnosisKind::ArdFault, "6c: ARD inferred from data");
    const auto r = hdf5::auto_repair(b);
    c.require(r.applied && b == golden, "6c: repair did not restore the file");
    parts.push_back("c");
  });

  timed([&] {
    const auto h0 = classify::halo_finder(golden_grid, params.threshold, params.min_cells);
    for (int delta : {-12, -1, 3}) {
      const Bytes b = with_field(golden, "datatype.exponent_bias", delta);
      const auto h1 = classify::halo_finder(hdf5::read_dataset(b), params.threshold, params.min_cells);
      bool same = h0.size() == h1.size() && !h0.empty();
      for (std::size_t i = 0; same && i < h0.size(); ++i) {
        same = h0[i].cells == h1[i].cells && h0[i].centroid == h1[i].centroid &&
               h1[i].mass == std::ldexp(h0[i].mass, -delta);
      }
      c.require(same, "6d: bias " + std::to_string(delta) + " changed halos beyond mass scaling");
    }
    parts.push_back("d");
  });

  c.require(slowest < 1.0, "6: a sub-check took over 1 s");
  std::string joined;
  for (const auto& p : parts) joined += p;
  report(6, "repair suite", c, slowest, 0, "8^3 f64 fixture, parts " + joined + " each under 1 s, time shown is the slowest");
}

// ---- 7 ----------------------------------------------------------------

void metadata_sweep() {
  Check c;
  const auto t0 = Clock::now();
  const Bytes file = fixtures::fixture_file().bytes;
  const auto map = hdf5::build_field_map(hdf5::parse_file(file));
  const auto params = fixtures::fixture_params();
  const auto golden = classify::analyze_file(file, params);
  const auto recs = hdf5::sweep_metadata(file, map, [&](ByteSpan b) {
    return classify::classify_toy(classify::analyze_file(b, params), golden.catalog);
  });
  c.require(recs.size() == map.size, "not every metadata byte swept");
  std::array<std::uint64_t, 4> counts{};
  for (std::size_t i = 0; i < recs.size(); ++i) {
    const auto& r = recs[i];
    c.require(r.offset == i, "sweep skipped a byte");
    ++counts[static_cast<std::size_t>(r.outcome)];
    if (r.role == hdf5::FieldRole::Signature || r.role == hdf5::FieldRole::Version) {
      c.require(r.outcome == OutcomeClass::Crash, "signature/version byte " + std::to_string(i) + " not a crash");
    }
    if (r.role == hdf5::FieldRole::Reserved) {
      c.require(r.outcome == OutcomeClass::Benign, "reserved byte " + std::to_string(i) + " not benign");
    }
  }
  c.require(std::accumulate(counts.begin(), counts.end(), std::uint64_t{0}) == map.size, "classes do not partition");
  char buf[200];
  const double n = static_cast<double>(map.size);
  std::snprintf(buf, sizeof buf, "%llu bytes: benign %.1f%%, detected %.1f%%, sdc %.1f%%, crash %.1f%%",
                static_cast<unsigned long long>(map.size), 100 * counts[0] / n, 100 * counts[1] / n,
                100 * counts[2] / n, 100 * counts[3] / n);
  report(7, "metadata sweep", c, since(t0), 0, buf);
}

// ---- 8 ----------------------------------------------------------------

void campaigns() {
  Check c;
  const auto t0 = Clock::now();
  TempDir dir;
  const std::uint64_t data_start = hdf5::parse_file(hdf5::write_dataset(
      classify::generate_grid({32, 32, 32}, 1, classify::toy_halo_spec(4)), hdf5::Precision::F64).bytes).metadata_size;

  auto run = [&](const std::string& model, const std::string& sub) {
    return campaign::run_campaign(fixtures::toy_config(model, 200, dir / sub), false);
  };
  const auto dropped = run("DroppedWrite", "dropped");
  const auto flipped = run("BitFlip", "bitflip");

  for (const auto* r : {&dropped, &flipped}) {
    c.require(r->n_runs == 200, r->name + ": not 200 runs");
    for (const auto& rec : r->runs) {
      c.require(rec.fired && rec.injected_records == 1, r->name + ": a run without exactly one fault");
    }
  }

  std::uint64_t data_hits = 0, data_benign = 0, nonbenign = 0, flagged = 0, reduced = 0;
  for (const auto& rec : dropped.runs) {
    if (!rec.injected || !rec.injected->offset || *rec.injected->offset < data_start) continue;
    ++data_hits;
    if (rec.outcome == OutcomeClass::Benign) {
      ++data_benign;
      continue;
    }
    ++nonbenign;
    flagged += rec.suspect.value_or(false);
    const auto mean = rec.stats.find("mean");
    if (mean != rec.stats.end() && mean->is_number() && mean->get<double>() <= 0.999) ++reduced;
  }
  c.require(data_hits > 0, "no data-region hits");
  c.require(data_benign == 0, "benign data-region hits under DroppedWrite");
  c.require(flagged == nonbenign, "detector missed a non-benign run");
  c.require(reduced == nonbenign, "a non-benign run kept its mean within 0.1%");

  const auto rate = [](const campaign::CampaignResult& r, OutcomeClass k) { return r.classes[static_cast<std::size_t>(k)].rate; };
  c.require(rate(flipped, OutcomeClass::Benign) > rate(dropped, OutcomeClass::Benign), "BitFlip not more benign");
  c.require(rate(flipped, OutcomeClass::Sdc) < rate(dropped, OutcomeClass::Sdc), "BitFlip SDC not smaller");

  const auto dropped2 = run("DroppedWrite", "dropped-again");
  const auto flipped2 = run("BitFlip", "bitflip-again");
  for (OutcomeClass k : kAllOutcomes) {
    c.require(dropped.count(k) == dropped2.count(k), "DroppedWrite rerun differs");
    c.require(flipped.count(k) == flipped2.count(k), "BitFlip rerun differs");
  }

  char buf[400];
  std::snprintf(buf, sizeof buf,
                "dropped B/D/S/C %llu/%llu/%llu/%llu, data hits %llu with 0 benign=%s, flagged %llu/%llu, "
                "mean -0.1%% %llu/%llu; bitflip B/D/S/C %llu/%llu/%llu/%llu; reruns identical",
                static_cast<unsigned long long>(dropped.count(OutcomeClass::Benign)),
                static_cast<unsigned long long>(dropped.count(OutcomeClass::Detected)),
                static_cast<unsigned long long>(dropped.count(OutcomeClass::Sdc)),
                static_cast<unsigned long long>(dropped.count(OutcomeClass::Crash)),
                static_cast<unsigned long long>(data_hits), data_benign == 0 ? "yes" : "no",
                static_cast<unsigned long long>(flagged), static_cast<unsigned long long>(nonbenign),
                static_cast<unsigned long long>(reduced), static_cast<unsigned long long>(nonbenign),
                static_cast<unsigned long long>(flipped.count(OutcomeClass::Benign)),
                static_cast<unsigned long long>(flipped.count(OutcomeClass::Detected)),
                static_cast<unsigned long long>(flipped.count(OutcomeClass::Sdc)),
                static_cast<unsigned long long>(flipped.count(OutcomeClass::Crash)));
  report(8, "toy campaigns", c, since(t0), 600, buf);
}

// ---- 9 ----------------------------------------------------------------

std::set<std::vector<std::size_t>> components(const DensityGrid& g, double factor, std::size_t min_cells) {
  const double cut = factor * g.mean();
  std::vector<int> label(g.size(), -1);
  std::set<std::vector<std::size_t>> out;
  const long nx = g.dims[0], ny = g.dims[1], nz = g.dims[2];
  int next = 0;
  for (std::size_t s = 0; s < g.size(); ++s) {
    if (label[s] >= 0 || !(g.cells[s] > cut)) continue;
    // Flood fill over face neighbours.
    std::vector<std::size_t> stack{s}, cells;
    label[s] = next;
    while (!stack.empty()) {
      const std::size_t i = stack.back();
      stack.pop_back();
      cells.push_back(i);
      const long x = i / (ny * nz), y = (i / nz) % ny, z = i % nz;
      const long nb[6][3] = {{x - 1, y, z}, {x + 1, y, z}, {x, y - 1, z}, {x, y + 1, z}, {x, y, z - 1}, {x, y, z + 1}};
      for (const auto& q : nb) {
        if (q[0] < 0 || q[1] < 0 || q[2] < 0 || q[0] >= nx || q[1] >= ny || q[2] >= nz) continue;
        const std::size_t j = (q[0] * ny + q[1]) * nz + q[2];
        if (label[j] < 0 && g.cells[j] > cut) {
          label[j] = next;
          stack.push_back(j);
        }
      }
    }
    ++next;
    std::sort(cells.begin(), cells.end());
    if (cells.size() >= min_cells) out.insert(cells);
  }
  return out;
}

void halo_oracle() {
  Check c;
  const auto t0 = Clock::now();
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0, 1);
  for (int t = 0; t < 500; ++t) {
    DensityGrid g(1 + rng() % 16, 1 + rng() % 16, 1 + rng() % 16);
    const double p = 0.01 + 0.3 * u(rng);
    for (double& x : g.cells) x = u(rng) < p ? 20 + 200 * u(rng) : u(rng);
    const double factor = 1 + 30 * u(rng);
    const std::size_t min_cells = 1 + rng() % 8;
    std::set<std::vector<std::size_t>> got;
    for (const auto& h : classify::halo_finder(g, factor, min_cells)) got.insert(h.cells);
    c.require(got == components(g, factor, min_cells), "grid " + std::to_string(t) + " differs");
  }
  report(9, "halo finder oracle", c, since(t0), 0, "500 random grids <= 16^3, exact component match");
}

}  // namespace

int main() {
  const std::vector<std::function<void()>> criteria = {fault_models, transparency,   uniformity,
                                                       intervals,    hdf5_round_trip, repair_suite,
                                                       metadata_sweep, campaigns,    halo_oracle};
  for (const auto& f : criteria) {
    try {
      f();
    } catch (const std::exception& e) {
      ++failures;
      std::printf("criterion FAIL  exception: %s\n", e.what());
    }
  }
  std::printf("%d of %zu criteria failed\n", failures, criteria.size());
  return failures;
}
