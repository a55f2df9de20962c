#include <doctest.h>

#include "bansim/error.hpp"
#include "bansim/superframe.hpp"

using namespace bansim;

namespace {

LayoutConfig sample() {
  LayoutConfig c;
  c.slot_length = Micros{500};
  c.slots_per_superframe = 100;
  c.beacon_slots = 1;
  c.eap1 = 4;
  c.rap1 = 30;
  c.type_a = 20;
  c.eap2 = 5;
  c.rap2 = 20;
  c.type_b = 10;
  c.cap = 10;
  c.type_b_label = AccessPhaseType::TypeII;
  return c;
}

}  // namespace

TEST_CASE("phases tile the superframe in order") {
  const auto l = build_layout(sample());
  const PhaseKind order[] = {PhaseKind::Beacon, PhaseKind::EAP1, PhaseKind::RAP1, PhaseKind::TypeI_II_a,
                             PhaseKind::EAP2,   PhaseKind::RAP2, PhaseKind::TypeI_II_b, PhaseKind::CAP};
  REQUIRE(l.phases().size() == 8);
  int next = 0;
  for (std::size_t i = 0; i < 8; ++i) {
    CHECK(l.phases()[i].kind == order[i]);
    CHECK(l.phases()[i].start_slot == next);
    next += l.phases()[i].length_slots;
  }
  CHECK(next == 100);
  CHECK(l.find(PhaseKind::TypeI_II_b)->label == AccessPhaseType::TypeII);
  CHECK(l.superframe_duration() == Micros{50000});
}

TEST_CASE("zero-length phases are omitted") {
  LayoutConfig c;
  c.slots_per_superframe = 10;
  c.rap1 = 9;
  const auto l = build_layout(c);
  CHECK(l.phases().size() == 2);
  CHECK(l.find(PhaseKind::CAP) == nullptr);
}

TEST_CASE("lengths must sum to the superframe") {
  auto c = sample();
  c.cap = 11;
  CHECK_THROWS_AS(build_layout(c), Error);
  c = sample();
  c.rap1 = -1;
  CHECK_THROWS_AS(build_layout(c), Error);
}

TEST_CASE("phase_at boundaries") {
  const auto l = build_layout(sample());
  auto p = phase_at(l, Micros{0});
  CHECK(p.kind == PhaseKind::Beacon);
  p = phase_at(l, Micros{499});
  CHECK(p.kind == PhaseKind::Beacon);
  CHECK(p.remaining == Micros{1});
  p = phase_at(l, Micros{500});
  CHECK(p.kind == PhaseKind::EAP1);
  CHECK(p.end == Micros{2500});
  CHECK(phase_at(l, Micros{49999}).kind == PhaseKind::CAP);
  CHECK_THROWS_AS(phase_at(l, Micros{50000}), Error);
  CHECK_THROWS_AS(phase_at(l, Micros{-1}), Error);
}

TEST_CASE("admission by phase, priority and method") {
  CHECK(admissible(PhaseKind::EAP1, 7, AccessMethod::Contention));
  CHECK_FALSE(admissible(PhaseKind::EAP1, 6, AccessMethod::Contention));
  CHECK(admissible(PhaseKind::RAP1, 0, AccessMethod::Contention));
  CHECK(admissible(PhaseKind::CAP, 3, AccessMethod::Contention));
  CHECK_FALSE(admissible(PhaseKind::TypeI_II_a, 7, AccessMethod::Contention));
  CHECK(admissible(PhaseKind::TypeI_II_a, 2, AccessMethod::Polled));
  CHECK(admissible(PhaseKind::TypeI_II_b, 2, AccessMethod::Scheduled));
  CHECK_FALSE(admissible(PhaseKind::RAP2, 2, AccessMethod::Polled));
  CHECK_FALSE(admissible(PhaseKind::Beacon, 7, AccessMethod::Contention));

  LayoutConfig c;
  c.mode = OperationalMode::NonBeaconWithoutBoundaries;
  c.slots_per_superframe = 10;
  const auto l = build_layout(c);
  REQUIRE(l.phases().size() == 1);
  CHECK(admissible(l, PhaseKind::TypeI_II_a, 4, AccessMethod::Polled));
  CHECK_FALSE(admissible(l, PhaseKind::TypeI_II_a, 4, AccessMethod::Scheduled));
}

TEST_CASE("beacon period and prohibition") {
  auto c = sample();
  c.beacon_period = 3;
  auto l = build_layout(c);
  CHECK(l.superframe_active(0));
  CHECK_FALSE(l.superframe_active(1));
  CHECK(l.superframe_active(3));
  CHECK(l.beacon_transmitted(3));
  CHECK_FALSE(l.beacon_transmitted(4));
  c.beacon_prohibited = true;
  l = build_layout(c);
  CHECK_FALSE(l.beacon_transmitted(0));
}

TEST_CASE("poll grants: round robin, whole grants only") {
  const auto l = build_layout(sample());  // Type I/II a: slots 35..54
  const int nodes[] = {4, 9};
  const auto g = schedule_polls(l, nodes, PhaseKind::TypeI_II_a, Micros{3000});
  REQUIRE(g.size() == 3);
  CHECK(g[0].node_id == 4);
  CHECK(g[1].node_id == 9);
  CHECK(g[2].node_id == 4);
  CHECK(g[0].start == Micros{17500});
  CHECK(g[1].start == Micros{20500});
  CHECK(schedule_polls(l, {}, PhaseKind::TypeI_II_a, Micros{3000}).empty());
  CHECK(schedule_polls(l, nodes, PhaseKind::TypeI_II_a, Micros{20000}).empty());
  CHECK_THROWS_AS(schedule_polls(l, nodes, PhaseKind::RAP1, Micros{100}), Error);
  CHECK(poll_grant_length(Micros{1000}, Micros{300}, Micros{20}, Micros{85}) == Micros{1405});
}

TEST_CASE("scheduled allocations: periodicity and conflicts") {
  const auto l = build_layout(sample());
  std::vector<ScheduledAllocation> a{{1, 35, 5, 1, 0, LinkDirection::Uplink},
                                     {2, 40, 5, 2, 0, LinkDirection::Downlink},
                                     {3, 40, 5, 2, 1, LinkDirection::Bilink}};
  validate_allocations(a, l);
  auto even = place_scheduled(a, l, 0);
  auto odd = place_scheduled(a, l, 1);
  CHECK(even[35] == 1);
  CHECK(even[42] == 2);
  CHECK(odd[42] == 3);
  CHECK_FALSE(even[50].has_value());
  a.push_back({4, 44, 2, 1, 0, LinkDirection::Uplink});
  CHECK_THROWS_AS(validate_allocations(a, l), Error);
  std::vector<ScheduledAllocation> outside{{1, 10, 2, 1, 0, LinkDirection::Uplink}};
  CHECK_THROWS_AS(validate_allocations(outside, l), Error);
  CHECK(parse_direction("delayed-bilink") == LinkDirection::DelayedBilink);
  CHECK_THROWS_AS(parse_direction("sideways"), Error);
}
