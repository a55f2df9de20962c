#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "bansim/csma.hpp"
#include "bansim/phy.hpp"
#include "bansim/ppdu.hpp"
#include "bansim/security.hpp"
#include "bansim/superframe.hpp"

namespace bansim {

/// Ideal: overlapping transmissions are a modelling error and abort the run.
/// Collision: every frame involved in an overlap is lost.
enum class ChannelMode { Ideal, Collision };

enum class TrafficKind { Saturated, Poisson, Scripted };

struct TrafficModel {
  TrafficKind kind = TrafficKind::Saturated;
  double rate_per_s = 0;         // Poisson arrivals per second
  std::vector<Micros> arrivals;  // scripted arrival times
};

struct NodeSpec {
  int id = 1;  // 0 is the hub
  PriorityClass priority = default_priority(0);
  AccessMethod access = AccessMethod::Contention;
  TrafficModel traffic;
  int payload_bytes = 100;
  SecurityLevel security = SecurityLevel::Unsecured;
  MasterKeySource mk = MasterKeySource::Preshared;
  std::optional<int> group;
  /// Backoff counters used, in order, before falling back to random draws.
  std::vector<int> backoff_script;
  /// 1-based transmission attempts that receive no acknowledgement.
  std::vector<int> lost_attempts;
};

/// Replaces the superframe layout with a fixed list of windows; time
/// outside every window admits no access.
struct PhaseWindow {
  PhaseKind kind;
  Micros start;
  Micros end;
};

/// Channel activity from outside the network, sensed by every node.
struct BusyInterval {
  Micros start;
  Micros end;
};

struct RunConfig {
  std::uint64_t seed = 1;
  Micros duration{1'000'000};
  ChannelMode channel = ChannelMode::Collision;
  double bit_error_rate = 0;
  std::size_t queue_capacity = 0;  // 0: unbounded
  int max_retries = 0;             // 0: retry until delivered
  int beacon_body_bytes = 0;
  bool record_trace = true;
};

struct Scenario {
  PhyConfig phy;
  LayoutConfig superframe;
  std::vector<PhaseWindow> scripted_phases;
  std::vector<BusyInterval> busy;
  MacTimingConstants timing;
  std::vector<NodeSpec> nodes;
  std::vector<ScheduledAllocation> allocations;
  RunConfig run;
};

/// Throws invalid-scenario (or the component's own error) before any event.
void validate(const Scenario& scenario);

struct NodeStats {
  int node = 0;  // -1 for the aggregate row
  std::int64_t offered = 0;
  std::int64_t delivered = 0;
  std::int64_t failed = 0;    // dropped after retries or on queue overflow
  std::int64_t overflow = 0;  // subset of failed
  std::int64_t collided = 0;  // transmission attempts lost to overlap
  std::int64_t attempts = 0;
  std::int64_t queued = 0;    // still queued, including any frame in flight
  std::int64_t payload_bits = 0;
  double payload_time_us = 0;
  double efficiency = 0;
  double mean_access_delay_us = 0;
  std::int64_t busy_us = 0;  // own airtime; channel total in the aggregate
  std::int64_t idle_us = 0;  // channel idle time
};

struct RunStats {
  std::vector<NodeStats> nodes;
  NodeStats aggregate;
  Micros elapsed{0};
  std::int64_t beacons = 0;
  std::int64_t polls = 0;
};

struct RunResult {
  RunStats stats;
  std::vector<TraceEvent> trace;
};

/// Deterministic for a given scenario, seed included.
RunResult run(const Scenario& scenario);

/// Runs `seeds.size()` copies on up to `threads` threads; results in seed order.
std::vector<RunResult> run_seeds(const Scenario& scenario, const std::vector<std::uint64_t>& seeds, int threads);

/// Rounded airtime of a frame with `body_bytes`, as used by the kernel.
Micros frame_duration(const PhyConfig& cfg, std::size_t body_bytes);

inline constexpr std::string_view kStatsCsvHeader =
    "seed,node,offered,delivered,failed,collided,attempts,queued,payload_bits,efficiency,mean_access_delay_us,"
    "busy_us,idle_us";

/// One row per node plus an `all` row.
std::string stats_csv(const RunStats& stats, std::uint64_t seed);
std::string stats_csv(const std::vector<RunResult>& runs, const std::vector<std::uint64_t>& seeds);
std::string trace_csv(const std::vector<TraceEvent>& trace);
std::vector<TraceEvent> trace_from_csv(std::string_view text);
/// FNV-1a of `trace_csv`.
std::uint64_t trace_hash(const std::vector<TraceEvent>& trace);

}  // namespace bansim
