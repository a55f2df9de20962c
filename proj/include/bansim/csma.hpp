#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <string_view>

#include "bansim/superframe.hpp"

namespace bansim {

struct PriorityClass {
  int user_priority = 0;
  int cw_min = 16;
  int cw_max = 64;
  friend bool operator==(const PriorityClass&, const PriorityClass&) = default;
};

/// CW bounds indexed by user priority 0..7.
const std::array<PriorityClass, 8>& default_priority_table();
PriorityClass default_priority(int user_priority);
void validate(const PriorityClass& p);

struct MacTimingConstants {
  Micros psifs{20};
  Micros slot{40};  // CSMA slot, distinct from the allocation slot
  Micros guard{85};
  void validate() const;
};

/// Per-node contention state. `counter` 0 means no backoff is pending.
struct BackoffState {
  PriorityClass priority;
  int cw = 0;
  int counter = 0;
  bool locked = false;
  int consecutive_failures = 0;

  static BackoffState initial(const PriorityClass& p);
  friend bool operator==(const BackoffState&, const BackoffState&) = default;
};

using Rng = std::mt19937_64;

/// Uniform integer in [lo, hi] by rejection, identical on every platform.
std::int64_t uniform_int(Rng& rng, std::int64_t lo, std::int64_t hi);
/// Uniform double in [0, 1) from the top 53 bits.
double uniform_unit(Rng& rng);

/// Counter uniform in [1, cw]; the state comes back unlocked.
BackoffState draw_backoff(BackoffState s, Rng& rng);
/// Sets a given counter; throws out-of-range unless 1 <= counter <= cw.
BackoffState assign_backoff(BackoffState s, int counter);

struct IdleSlotResult {
  BackoffState state;
  bool transmit = false;
};

/// One idle CSMA slot. A locked state is left unchanged.
IdleSlotResult on_idle_slot(BackoffState s);
BackoffState on_busy(BackoffState s);
BackoffState unlock(BackoffState s);

enum class GuardDecision { Proceed, Lock };

/// Locks when the remaining countdown plus one frame exchange and guard
/// time would end after `phase_end`. No phase end means no limit.
GuardDecision guard_check(const BackoffState& s, Micros now, std::optional<Micros> phase_end, Micros frame_airtime,
                          Micros ack_airtime, const MacTimingConstants& t);

/// Counts the failure and doubles CW on every second consecutive one,
/// capped at cw_max. The counter is cleared; the caller draws next.
BackoffState apply_failure(BackoffState s);
BackoffState on_failure(BackoffState s, Rng& rng);
/// Restores cw_min and clears failures, lock and counter.
BackoffState on_success(BackoffState s);

struct TraceEvent {
  std::int64_t time_us = 0;
  int node = 0;
  std::string event;
  int counter = 0;
  int cw = 0;
  int failures = 0;
  std::string phase;
};

inline constexpr std::string_view kTraceHeader = "time_us,node,event,counter,cw,failures,phase";

std::string format_trace_line(const TraceEvent& e);
TraceEvent parse_trace_line(std::string_view line);

}  // namespace bansim
