// Acceptance checks, one line per criterion. Exit status is the number of
// failed criteria.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "bansim/csma.hpp"
#include "bansim/efficiency.hpp"
#include "bansim/error.hpp"
#include "bansim/format.hpp"
#include "bansim/kasami.hpp"
#include "bansim/phy.hpp"
#include "bansim/ppdu.hpp"
#include "bansim/scenario.hpp"
#include "bansim/security.hpp"
#include "bansim/sim.hpp"

using namespace bansim;

namespace {

// Pinned tolerances.
constexpr double kRateTolKbps = 0.1;
constexpr double kLowRateBand[2] = {0.806, 0.866};
constexpr double kHighRateBand[2] = {0.664, 0.724};
constexpr double kSimRelTol = 0.01;
constexpr int kFramesPerPhy = 1000;
constexpr int kCwSequences = 100'000;
constexpr int kSessions = 1000;

struct Outcome {
  bool ok = true;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

int failures = 0;

void criterion(int id, const char* name, double budget_s, const std::function<Outcome()>& body) {
  const auto t0 = Clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double s = std::chrono::duration<double>(Clock::now() - t0).count();
  const bool in_time = s < budget_s;
  const bool pass = o.ok && in_time;
  if (!pass) ++failures;
  std::printf("criterion %2d %-32s %s  (%.2f s, budget %.0f s)%s%s\n", id, name, pass ? "PASS" : "FAIL", s,
              budget_s, o.detail.empty() ? "" : "  ", o.detail.c_str());
  if (!in_time) std::printf("             over time budget\n");
  std::fflush(stdout);
}

const PhyRegistry& reg() {
  static const auto r = PhyRegistry::builtin();
  return r;
}

std::string slurp(const std::string& path) {
  std::ifstream f(path);
  std::stringstream s;
  s << f.rdbuf();
  return s.str();
}

Outcome rates() {
  // Values as printed in the published table, 2360/2400 MHz group split.
  const double published[21] = {57.5, 75.9,  303.6, 57.5,  75.9,  151.8, 76.6,  101.2, 404.8, 91.9, 121.4,
                                485.7, 76.6, 101.2, 404.8, 91.9, 121.4, 485.7, 91.9,  121.4, 485.7};
  const auto table = rate_table_configs();
  if (table.size() != 21) return {false, "table has " + std::to_string(table.size()) + " rows"};
  // Rates as the rates command prints them, read back from its CSV.
  const auto printed = phy_configs_from_csv(phy_configs_to_csv(table));
  const auto text = rate_table_text(table);
  double worst = 0;
  for (std::size_t i = 0; i < 21; ++i) {
    worst = std::max(worst, std::abs(row_rate(printed[i]) - published[i]));
    if (text.find(fixed(published[i], 1)) == std::string::npos) return {false, "missing " + fixed(published[i], 1)};
  }
  return {worst <= kRateTolKbps, "max |delta| " + fixed(worst, 3) + " Kbps"};
}

Outcome scripted_walk() {
  const auto file = load_scenario(BANSIM_SOURCE_DIR "/tests/data/scripted_walk.ini", reg());
  const auto got = run(file.scenario).trace;
  const auto want = trace_from_csv(slurp(BANSIM_SOURCE_DIR "/tests/data/scripted_walk_trace.csv"));
  if (got.size() != want.size()) {
    return {false, std::to_string(got.size()) + " events, golden has " + std::to_string(want.size())};
  }
  for (std::size_t i = 0; i < want.size(); ++i) {
    if (format_trace_line(got[i]) != format_trace_line(want[i])) {
      return {false, "event " + std::to_string(i) + ": " + format_trace_line(got[i])};
    }
  }
  // The storyline itself, independent of the file.
  auto find = [&](const char* ev, const char* phase, std::size_t from) {
    for (std::size_t i = from; i < got.size(); ++i) {
      if (got[i].node == 1 && got[i].event == ev && got[i].phase == phase) return i;
    }
    return got.size();
  };
  const auto f1 = find("failure", "cap", 0);
  const auto d1 = find("draw", "cap", f1);
  const auto lb = find("lock_busy", "cap", d1);
  const auto lg = find("lock_guard", "cap", lb);
  const auto un = find("unlock", "rap2", lg);
  const auto f2 = find("failure", "rap2", un);
  const auto d2 = find("draw", "rap2", f2);
  const auto ok = find("success", "rap2", d2);
  const bool story = ok < got.size() && got[f1].cw == 8 && got[f1].failures == 1 && got[d1].counter == 5 &&
                     got[lb].counter == 2 && got[lg].counter == 2 && got[f2].cw == 16 && got[d2].counter == 8 &&
                     got[ok].cw == 8 && got[ok].failures == 0 && got[0].event == "phase_start" &&
                     got[2].event == "sifs";
  return {story, std::to_string(want.size()) + " events identical"};
}

Outcome efficiency_targets() {
  const double lo = analytic_efficiency(255, reg().find(kLowRateReferenceName));
  const double hi = analytic_efficiency(255, reg().find(kHighRateOverrideName));
  const bool ok = lo >= kLowRateBand[0] && lo <= kLowRateBand[1] && hi >= kHighRateBand[0] && hi <= kHighRateBand[1];
  const MacTimingConstants t;
  return {ok, "187.5 ksps row " + fixed(lo, 4) + ", 971.4 Kbps " + fixed(hi, 4) + " (pSIFS " +
                  std::to_string(t.psifs.count()) + " us, slot " + std::to_string(t.slot.count()) + " us, guard " +
                  std::to_string(t.guard.count()) + " us)"};
}

Outcome monotone() {
  for (const auto& c : rate_table_configs()) {
    double prev = 0;
    for (int p = 1; p <= 255; ++p) {
      const double e = analytic_efficiency(p, c);
      if (!(e > prev)) return {false, c.name + " at " + std::to_string(p)};
      prev = e;
    }
  }
  return {true, "21 x 255 points"};
}

Outcome sim_vs_analytic() {
  double worst = 0;
  std::string where;
  const char* configs[] = {"420mhz-r1", "2400mhz-971", "902mhz-r0"};
  for (const char* name : configs) {
    for (int payload : {10, 50, 100, 200, 255}) {
      Scenario sc;
      sc.phy = reg().find(name);
      sc.superframe.slot_length = Micros{1000};
      sc.superframe.slots_per_superframe = 20'000;
      sc.superframe.beacon_slots = 1;
      sc.superframe.rap1 = 19'999;
      sc.run.duration = Micros{20'000'000};
      sc.run.channel = ChannelMode::Ideal;
      sc.run.record_trace = false;
      NodeSpec n;
      n.id = 1;
      n.priority = default_priority(kHighestUserPriority);
      n.payload_bytes = payload;
      sc.nodes.push_back(n);
      const double sim = run(sc).stats.nodes[0].efficiency;
      const double ana = analytic_efficiency(payload, sc.phy);
      const double rel = std::abs(sim - ana) / ana;
      if (rel > worst) {
        worst = rel;
        where = std::string(name) + "/" + std::to_string(payload);
      }
    }
  }
  return {worst <= kSimRelTol, "3 configs x 5 payloads, worst " + fixed(100 * worst, 3) + "% at " + where};
}

Outcome codec() {
  std::mt19937_64 rng(6);
  std::size_t frames = 0;
  for (const auto& c : reg().configs()) {
    for (int k = 0; k < kFramesPerPhy; ++k) {
      Bytes hdr(kMacHeaderBytes), body(rng() % (kMaxBodyBytes + 1));
      for (auto& b : hdr) b = static_cast<std::uint8_t>(rng());
      for (auto& b : body) b = static_cast<std::uint8_t>(rng());
      FrameOptions o;
      o.burst_mode = (rng() & 1U) != 0;
      o.scrambler_seed = static_cast<std::uint8_t>(rng() & 3U);
      const auto p = build_ppdu(c, hdr, body, o);
      const auto q = parse_ppdu(ppdu_bits(p), c);
      if (!(ppdu_psdu(q) == ppdu_psdu(p)) || ppdu_psdu(q).body != body || ppdu_bits(q) != ppdu_bits(p)) {
        return {false, c.name + ": round trip mismatch"};
      }
      ++frames;
    }
  }
  std::size_t flips = 0;
  for (const auto& c : reg().configs()) {
    const Bytes hdr(kMacHeaderBytes, 0x5A);
    const Bytes body{0xC3, 0x01};
    const auto bits = ppdu_bits(build_ppdu(c, hdr, body));
    for (std::size_t i = 0; i < bits.size(); ++i) {
      auto bad = bits;
      bad[i] ^= 1;
      bool detected = false;
      try {
        parse_ppdu(bad, c);
      } catch (const Error&) {
        detected = true;
      }
      if (!detected) return {false, c.name + ": flip at bit " + std::to_string(i) + " accepted"};
      ++flips;
    }
  }
  return {true, std::to_string(frames) + " frames, " + std::to_string(flips) + " flips detected"};
}

Outcome kasami() {
  const auto set = kasami63_set();
  std::set<int> seen;
  for (std::size_t a = 0; a < set.size(); ++a) {
    for (std::size_t b = 0; b < set.size(); ++b) {
      for (int s = 0; s < kKasamiLength; ++s) {
        if (a == b && s == 0) continue;
        const int v = periodic_correlation(set[a], set[b], s);
        if (v != -1 && v != -9 && v != 7) {
          return {false, "value " + std::to_string(v) + " at (" + std::to_string(a) + "," + std::to_string(b) + ")"};
        }
        seen.insert(v);
      }
    }
  }
  return {set.size() == 8, std::to_string(set.size()) + " sequences, values seen: " + std::to_string(seen.size())};
}

// Parity-doubling rule, written out from scratch.
struct RefCw {
  int cw, cw_min, cw_max, fails = 0;
  void fail() {
    ++fails;
    if (fails % 2 == 0) cw = std::min(2 * cw, cw_max);
  }
  void succeed() {
    cw = cw_min;
    fails = 0;
  }
};

Outcome cw_rule() {
  std::mt19937_64 gen(8);
  std::uniform_int_distribution<int> up(0, 7), len(1, 64);
  std::bernoulli_distribution fail(0.55);
  Rng rng(9);
  for (int seq = 0; seq < kCwSequences; ++seq) {
    const auto p = default_priority(up(gen));
    RefCw ref{p.cw_min, p.cw_min, p.cw_max};
    auto s = BackoffState::initial(p);
    const int n = len(gen);
    for (int k = 0; k < n; ++k) {
      if (fail(gen)) {
        ref.fail();
        s = on_failure(s, rng);
      } else {
        ref.succeed();
        s = draw_backoff(on_success(s), rng);
      }
      if (s.cw != ref.cw || s.consecutive_failures != ref.fails || s.counter < 1 || s.counter > s.cw) {
        return {false, "sequence " + std::to_string(seq) + " step " + std::to_string(k)};
      }
    }
  }
  return {true, std::to_string(kCwSequences) + " sequences"};
}

Outcome security() {
  const Bytes body{9, 8, 7, 6, 5};
  auto code = [](auto&& fn) -> std::optional<Errc> {
    try {
      fn();
    } catch (const Error& e) {
      return e.code();
    }
    return std::nullopt;
  };
  // No level >= 1 frame without a PTK.
  std::mt19937_64 g(10);
  int refused = 0;
  for (int trial = 0; trial < 300; ++trial) {
    KeyManager km;
    auto s = km.associate(1, (g() & 1U) ? SecurityLevel::AuthOnly : SecurityLevel::AuthEncrypt);
    for (int op = 0; op < 40; ++op) {
      const auto r = g() % 3;
      if (r == 0) km.end_session(s);
      if (r == 1 && !s.ptk_active()) km.establish_ptk(s);
      if (r == 2) {
        const auto c = code([&] { secure_frame(body, s); });
        if (s.ptk_active() == c.has_value()) return {false, "frame sent without PTK or refused with one"};
        if (c) ++refused;
      }
    }
  }
  // PTK uniqueness.
  KeyManager km;
  std::set<std::uint64_t> ids;
  std::vector<SecuritySession> nodes;
  for (int n = 1; n <= 40; ++n) nodes.push_back(km.associate(n, SecurityLevel::AuthEncrypt));
  for (auto& s : nodes) ids.insert(s.ptk->key_id);
  while (ids.size() < kSessions) {
    for (auto& s : nodes) {
      if (ids.size() >= kSessions) break;
      km.end_session(s);
      km.establish_ptk(s);
      if (!ids.insert(s.ptk->key_id).second) return {false, "PTK repeated"};
    }
  }
  // Replay rejection.
  auto tx = km.associate(100, SecurityLevel::AuthOnly);
  auto rx = tx;
  const auto f1 = secure_frame(body, tx);
  const auto f2 = secure_frame(body, tx);
  admit_frame(f2, rx);
  if (code([&] { admit_frame(f2, rx); }) != Errc::Replay) return {false, "duplicate admitted"};
  if (code([&] { admit_frame(f1, rx); }) != Errc::Replay) return {false, "stale counter admitted"};
  // Cross-session tag failure.
  const auto old = secure_frame(body, tx);
  km.end_session(tx);
  km.establish_ptk(tx);
  auto fresh = tx;
  if (code([&] { admit_frame(old, fresh); }) != Errc::TagFailure) return {false, "old-session frame admitted"};
  return {true, std::to_string(refused) + " keyless sends refused, " + std::to_string(ids.size()) + " unique PTKs"};
}

Outcome determinism() {
  const char* files[] = {"single_node_ideal", "contention_four_nodes", "polled_type_ii", "scheduled_allocations",
                         "secured_group"};
  for (const char* name : files) {
    const auto file = load_scenario(std::string(BANSIM_SOURCE_DIR) + "/scenarios/" + name + ".ini", reg());
    const auto a = run(file.scenario);
    const auto b = run(file.scenario);
    const auto seed = file.scenario.run.seed;
    if (stats_csv(a.stats, seed) != stats_csv(b.stats, seed)) return {false, std::string(name) + ": stats differ"};
    if (trace_csv(a.trace) != trace_csv(b.trace)) return {false, std::string(name) + ": trace differs"};
  }
  return {true, "5 bundled scenarios"};
}

}  // namespace

int main() {
  criterion(1, "rate table", 1, rates);
  criterion(2, "scripted trace replay", 1, scripted_walk);
  criterion(3, "efficiency at 255 bytes", 1, efficiency_targets);
  criterion(4, "efficiency monotone in payload", 5, monotone);
  criterion(5, "simulated vs analytic", 30, sim_vs_analytic);
  criterion(6, "codec round trip and flips", 10, codec);
  criterion(7, "kasami correlation", 5, kasami);
  criterion(8, "contention window rule", 5, cw_rule);
  criterion(9, "security properties", 5, security);
  criterion(10, "determinism", 60, determinism);
  std::printf("%d of 10 criteria failed\n", failures);
  return failures;
}
