#include <doctest.h>

#include <algorithm>
#include <map>

#include "bansim/csma.hpp"
#include "bansim/error.hpp"

using namespace bansim;

TEST_CASE("priority table") {
  CHECK(default_priority(0).cw_min == 16);
  CHECK(default_priority(0).cw_max == 64);
  CHECK(default_priority(7).cw_min == 1);
  CHECK(default_priority(7).cw_max == 4);
  for (int up = 1; up < 8; ++up) CHECK(default_priority(up).cw_min <= default_priority(up - 1).cw_min);
  CHECK_THROWS_AS(default_priority(8), Error);
  CHECK_THROWS_AS(validate(PriorityClass{1, 8, 4}), Error);
}

TEST_CASE("draws stay in [1, cw] and cover it") {
  Rng rng(4);
  auto s = BackoffState::initial(default_priority(0));
  std::map<int, int> seen;
  for (int i = 0; i < 20000; ++i) {
    s.locked = true;
    s = draw_backoff(s, rng);
    CHECK_FALSE(s.locked);
    ++seen[s.counter];
  }
  CHECK(seen.size() == 16);
  CHECK(seen.begin()->first == 1);
  CHECK(seen.rbegin()->first == 16);
  for (auto [k, v] : seen) CHECK(v > 1000);
}

TEST_CASE("assign checks range") {
  auto s = BackoffState::initial(default_priority(3));
  CHECK(assign_backoff(s, 8).counter == 8);
  CHECK_THROWS_AS(assign_backoff(s, 0), Error);
  CHECK_THROWS_AS(assign_backoff(s, 9), Error);
}

TEST_CASE("countdown, freeze and transmit") {
  auto s = assign_backoff(BackoffState::initial(default_priority(3)), 2);
  auto r = on_idle_slot(s);
  CHECK(r.state.counter == 1);
  CHECK_FALSE(r.transmit);
  auto locked = on_busy(r.state);
  CHECK(locked.locked);
  CHECK(on_idle_slot(locked).state == locked);
  r = on_idle_slot(unlock(locked));
  CHECK(r.state.counter == 0);
  CHECK(r.transmit);
}

TEST_CASE("guard check locks only when the exchange would overrun") {
  const MacTimingConstants t;
  auto s = assign_backoff(BackoffState::initial(default_priority(3)), 2);
  // 2 slots + frame + pSIFS + ack + guard = 80 + 600 + 20 + 300 + 85 = 1085
  CHECK(guard_check(s, Micros{0}, Micros{1085}, Micros{600}, Micros{300}, t) == GuardDecision::Proceed);
  CHECK(guard_check(s, Micros{1}, Micros{1085}, Micros{600}, Micros{300}, t) == GuardDecision::Lock);
  CHECK(guard_check(s, Micros{1}, std::nullopt, Micros{600}, Micros{300}, t) == GuardDecision::Proceed);
}

TEST_CASE("failure parity and success reset") {
  auto s = BackoffState::initial(default_priority(0));
  s = apply_failure(s);
  CHECK(s.cw == 16);
  s = apply_failure(s);
  CHECK(s.cw == 32);
  s = apply_failure(s);
  CHECK(s.cw == 32);
  s = apply_failure(s);
  CHECK(s.cw == 64);
  s = apply_failure(apply_failure(s));
  CHECK(s.cw == 64);
  CHECK(s.consecutive_failures == 6);
  s = on_success(s);
  CHECK(s.cw == 16);
  CHECK(s.consecutive_failures == 0);
}

TEST_CASE("CW rule against an independent interpreter") {
  Rng rng(2024);
  for (int seq = 0; seq < 20000; ++seq) {
    const auto p = default_priority(static_cast<int>(uniform_int(rng, 0, 7)));
    auto s = BackoffState::initial(p);
    int cw = p.cw_min, fails = 0;
    const auto len = uniform_int(rng, 1, 40);
    for (int k = 0; k < len; ++k) {
      if (uniform_unit(rng) < 0.6) {
        ++fails;
        if (fails % 2 == 0) cw = std::min(cw * 2, p.cw_max);
        s = on_failure(s, rng);
      } else {
        cw = p.cw_min;
        fails = 0;
        s = draw_backoff(on_success(s), rng);
      }
      REQUIRE(s.cw == cw);
      REQUIRE(s.consecutive_failures == fails);
      REQUIRE(s.counter >= 1);
      REQUIRE(s.counter <= cw);
    }
  }
}

TEST_CASE("trace lines round trip") {
  TraceEvent e{1484, 1, "failure", 0, 8, 1, "cap"};
  const auto line = format_trace_line(e);
  CHECK(line == "1484,1,failure,0,8,1,cap");
  const auto back = parse_trace_line(line);
  CHECK(back.time_us == 1484);
  CHECK(back.event == "failure");
  CHECK(back.phase == "cap");
  CHECK_THROWS_AS(parse_trace_line("1,2,3"), Error);
}
