#include "bansim/csma.hpp"

#include <algorithm>

#include "bansim/error.hpp"
#include "bansim/format.hpp"

namespace bansim {

const std::array<PriorityClass, 8>& default_priority_table() {
  static const std::array<PriorityClass, 8> table{{
      {0, 16, 64},
      {1, 16, 32},
      {2, 8, 32},
      {3, 8, 16},
      {4, 4, 16},
      {5, 4, 8},
      {6, 2, 8},
      {7, 1, 4},
  }};
  return table;
}

PriorityClass default_priority(int user_priority) {
  if (user_priority < 0 || user_priority > kHighestUserPriority) {
    throw Error(Errc::InvalidConfig, "user priority must be 0..7, got " + std::to_string(user_priority));
  }
  return default_priority_table()[static_cast<std::size_t>(user_priority)];
}

void validate(const PriorityClass& p) {
  if (p.user_priority < 0 || p.user_priority > kHighestUserPriority) {
    throw Error(Errc::InvalidConfig, "user priority must be 0..7");
  }
  if (p.cw_min < 1 || p.cw_max < p.cw_min) {
    throw Error(Errc::InvalidConfig, "need 1 <= cw_min <= cw_max for priority " + std::to_string(p.user_priority));
  }
}

void MacTimingConstants::validate() const {
  if (psifs <= Micros{0} || slot <= Micros{0} || guard < Micros{0}) {
    throw Error(Errc::InvalidConfig, "pSIFS and CSMA slot must be positive, guard time non-negative");
  }
}

BackoffState BackoffState::initial(const PriorityClass& p) {
  bansim::validate(p);
  BackoffState s;
  s.priority = p;
  s.cw = p.cw_min;
  return s;
}

std::int64_t uniform_int(Rng& rng, std::int64_t lo, std::int64_t hi) {
  if (hi < lo) throw Error(Errc::OutOfRange, "empty range");
  const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
  if (span == 0) return static_cast<std::int64_t>(rng());
  const std::uint64_t limit = Rng::max() - (Rng::max() % span + 1) % span;
  std::uint64_t v = rng();
  while (v > limit) v = rng();
  return lo + static_cast<std::int64_t>(v % span);
}

double uniform_unit(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

BackoffState draw_backoff(BackoffState s, Rng& rng) {
  s.counter = static_cast<int>(uniform_int(rng, 1, s.cw));
  s.locked = false;
  return s;
}

BackoffState assign_backoff(BackoffState s, int counter) {
  if (counter < 1 || counter > s.cw) {
    throw Error(Errc::OutOfRange,
                "backoff " + std::to_string(counter) + " outside [1, " + std::to_string(s.cw) + "]");
  }
  s.counter = counter;
  s.locked = false;
  return s;
}

IdleSlotResult on_idle_slot(BackoffState s) {
  if (s.locked || s.counter == 0) return {s, false};
  --s.counter;
  return {s, s.counter == 0};
}

BackoffState on_busy(BackoffState s) {
  s.locked = true;
  return s;
}

BackoffState unlock(BackoffState s) {
  s.locked = false;
  return s;
}

GuardDecision guard_check(const BackoffState& s, Micros now, std::optional<Micros> phase_end, Micros frame_airtime,
                          Micros ack_airtime, const MacTimingConstants& t) {
  if (!phase_end) return GuardDecision::Proceed;
  const Micros finish = now + t.slot * s.counter + frame_airtime + t.psifs + ack_airtime + t.guard;
  return finish > *phase_end ? GuardDecision::Lock : GuardDecision::Proceed;
}

BackoffState apply_failure(BackoffState s) {
  ++s.consecutive_failures;
  if (s.consecutive_failures % 2 == 0) s.cw = std::min(2 * s.cw, s.priority.cw_max);
  s.counter = 0;
  return s;
}

BackoffState on_failure(BackoffState s, Rng& rng) { return draw_backoff(apply_failure(s), rng); }

BackoffState on_success(BackoffState s) {
  s.cw = s.priority.cw_min;
  s.consecutive_failures = 0;
  s.locked = false;
  s.counter = 0;
  return s;
}

std::string format_trace_line(const TraceEvent& e) {
  return std::to_string(e.time_us) + ',' + std::to_string(e.node) + ',' + e.event + ',' + std::to_string(e.counter) +
         ',' + std::to_string(e.cw) + ',' + std::to_string(e.failures) + ',' + e.phase;
}

TraceEvent parse_trace_line(std::string_view line) {
  const auto f = split(trim(line), ',');
  if (f.size() != 7) throw Error(Errc::InvalidConfig, "trace line needs 7 fields: " + std::string(line));
  TraceEvent e;
  e.time_us = parse_int(f[0]);
  e.node = static_cast<int>(parse_int(f[1]));
  e.event = std::string(f[2]);
  e.counter = static_cast<int>(parse_int(f[3]));
  e.cw = static_cast<int>(parse_int(f[4]));
  e.failures = static_cast<int>(parse_int(f[5]));
  e.phase = std::string(f[6]);
  return e;
}

}  // namespace bansim
