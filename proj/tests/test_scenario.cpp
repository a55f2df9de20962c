#include <doctest.h>

#include <string>

#include "bansim/error.hpp"
#include "bansim/scenario.hpp"

using namespace bansim;

namespace {

const PhyRegistry& reg() {
  static const auto r = PhyRegistry::builtin();
  return r;
}

std::string error_of(const std::string& text) {
  try {
    parse_scenario(text, reg());
  } catch (const Error& e) {
    return e.what();
  }
  return "";
}

const char* kGood = R"(# comment line
[phy]
config = 863mhz-r1   # trailing comment

[superframe]
mode = beacon
slot_us = 250
slots = 40
beacon_slots = 1
eap1 = 4
rap1 = 15
type_a = 10
cap = 10
allocation = 2 20 5 period=2 offset=1 direction=downlink

[csma]
psifs_us = 30
priority.5 = 4 16

[nodes]
node = 1 priority=5 traffic=poisson:12.5 payload=33 backoff=2;3
node = 2 access=scheduled traffic=scripted:100;200;300 lost=1

[security]
node.1 = auth

[run]
seed = 77
duration_us = 123456
channel = collision
ber = 1e-5
max_retries = 3
stats = out.csv
)";

}  // namespace

TEST_CASE("a complete file") {
  const auto f = parse_scenario(kGood, reg());
  const auto& sc = f.scenario;
  CHECK(sc.phy.name == "863mhz-r1");
  CHECK(sc.superframe.slot_length == Micros{250});
  CHECK(sc.superframe.cap == 10);
  REQUIRE(sc.allocations.size() == 1);
  CHECK(sc.allocations[0].period == 2);
  CHECK(sc.allocations[0].direction == LinkDirection::Downlink);
  CHECK(sc.timing.psifs == Micros{30});
  CHECK(sc.timing.slot == Micros{40});
  REQUIRE(sc.nodes.size() == 2);
  CHECK(sc.nodes[0].priority.cw_min == 4);
  CHECK(sc.nodes[0].traffic.rate_per_s == doctest::Approx(12.5));
  CHECK(sc.nodes[0].backoff_script == std::vector<int>{2, 3});
  CHECK(sc.nodes[0].security == SecurityLevel::AuthOnly);
  CHECK(sc.nodes[1].access == AccessMethod::Scheduled);
  CHECK(sc.nodes[1].traffic.arrivals.size() == 3);
  CHECK(sc.nodes[1].lost_attempts == std::vector<int>{1});
  CHECK(sc.run.seed == 77);
  CHECK(sc.run.duration == Micros{123456});
  CHECK(sc.run.max_retries == 3);
  REQUIRE(f.stats_path.has_value());
  CHECK(f.stats_path->string() == "out.csv");
  CHECK_FALSE(f.trace_path.has_value());
}

TEST_CASE("errors name the line") {
  CHECK(error_of("[phy]\nconfig = 402mhz-r1\ncolour = red\n").find("line 3") != std::string::npos);
  CHECK(error_of("[phy]\nconfig = 402mhz-r1\n[weather]\n").find("line 3") != std::string::npos);
  CHECK(error_of("[phy]\nconfig = 402mhz-r1\nconfig = 402mhz-r0\n").find("line 3") != std::string::npos);
  CHECK(error_of("[phy]\nconfig = 999mhz\n").find("line 2") != std::string::npos);
  CHECK(error_of("stray = 1\n").find("line 1") != std::string::npos);
  CHECK(error_of("[phy]\nconfig = 402mhz-r1\n[superframe]\nphase = rap1 0 100\nphase = cap 50 200\n")
            .find("line 5") != std::string::npos);
  CHECK(error_of("[phy]\nconfig = 402mhz-r1\n[nodes]\nnode = 1 payload=abc\n").find("line 4") != std::string::npos);
  CHECK(error_of("[phy]\nconfig = 402mhz-r1\n[nodes]\nnode = 1\nnode = 1\n").find("line 5") != std::string::npos);
}

TEST_CASE("layout errors point at the section") {
  const auto e = error_of("[phy]\nconfig = 402mhz-r1\n\n[superframe]\nslots = 10\nrap1 = 3\n");
  CHECK(e.find("line 4") != std::string::npos);
}

TEST_CASE("validation errors carry the kind once") {
  auto text = std::string(kGood);
  text.replace(text.find("node = 2 access=scheduled"), 8, "node = 3");
  const auto e = error_of(text);
  CHECK(e.find("invalid-scenario: line") == 0);
  CHECK(e.find("scheduled access without an allocation") != std::string::npos);
  CHECK(e.find("invalid-scenario", 1) == std::string::npos);
}

TEST_CASE("missing phy") {
  CHECK_FALSE(error_of("[run]\nseed = 1\n").empty());
}

TEST_CASE("load_scenario prefixes the path") {
  try {
    load_scenario("/nonexistent/x.ini", reg());
    FAIL("no throw");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("/nonexistent/x.ini") != std::string::npos);
  }
}
