#include <doctest.h>

#include "bansim/efficiency.hpp"
#include "bansim/error.hpp"

using namespace bansim;

namespace {
const PhyRegistry& reg() {
  static const auto r = PhyRegistry::builtin();
  return r;
}
}  // namespace

TEST_CASE("cycle parts") {
  const auto& c = reg().find("420mhz-r1");
  const MacTimingConstants t;
  const auto x = exchange_cycle(100, c, t, default_priority(7));
  CHECK(x.backoff.count() == doctest::Approx(40.0));
  CHECK(x.sifs.count() == doctest::Approx(40.0));
  CHECK(x.frame.count() == doctest::Approx(frame_airtime(c, 100).total().count()));
  CHECK(x.ack.count() == doctest::Approx(frame_airtime(c, 0).total().count()));
  CHECK(x.payload.count() == doctest::Approx(800.0 / row_rate(c) * 1000.0));
  CHECK(analytic_efficiency(100, c) == doctest::Approx(x.payload / x.total()));
  const auto y = exchange_cycle(100, c, t, default_priority(0));
  CHECK(y.backoff.count() == doctest::Approx(40.0 * 17 / 2));
}

TEST_CASE("420 MHz GMSK row at 255 bytes, worked by hand") {
  // 187.5 ksps; header (31,19) spread 2; PSDU (63,51) unspread, 1 bit/symbol.
  const double pre = 90 / 187.5 * 1000;                      // 90-symbol preamble
  const double hdr = 19.0 * 31 * 2 / (187.5 * 19) * 1000;    // 19 header bits
  const double per_bit = 63.0 / (187.5 * 51) * 1000;         // us per PSDU bit
  const double frame = pre + hdr + (7 + 255 + 2) * 8 * per_bit;
  const double ack = pre + hdr + (7 + 2) * 8 * per_bit;
  const double cycle = 40 + frame + 2 * 20 + ack;             // slot x (1+1)/2, two pSIFS
  const double want = 255 * 8 * per_bit / cycle;
  CHECK(analytic_efficiency(255, reg().find(kLowRateReferenceName)) == doctest::Approx(want).epsilon(1e-9));
  CHECK(want == doctest::Approx(0.8353).epsilon(1e-4));
}

TEST_CASE("lower rate, higher efficiency") {
  for (int p : {1, 64, 255}) {
    CHECK(analytic_efficiency(p, reg().find("402mhz-r0")) > analytic_efficiency(p, reg().find("402mhz-r1")));
    CHECK(analytic_efficiency(p, reg().find("2400mhz-r1")) > analytic_efficiency(p, reg().find(kHighRateOverrideName)));
  }
  CHECK(analytic_efficiency(1, reg().find("2400mhz-r1")) < 0.1);
}

TEST_CASE("payload range") {
  const auto& c = reg().find("420mhz-r1");
  CHECK_THROWS_AS(analytic_efficiency(0, c), Error);
  CHECK_THROWS_AS(analytic_efficiency(256, c), Error);
}

TEST_CASE("bigger overheads cost efficiency") {
  const auto& c = reg().find("902mhz-r1");
  MacTimingConstants slow;
  slow.psifs = Micros{50};
  slow.slot = Micros{125};
  CHECK(analytic_efficiency(200, c, slow) < analytic_efficiency(200, c));
  CHECK(analytic_efficiency(200, c, {}, default_priority(0)) < analytic_efficiency(200, c));
}

TEST_CASE("sweep CSV round trip") {
  const std::vector<PhyConfig> cs{reg().find("402mhz-r1"), reg().find("hbc16")};
  const auto pts = sweep(cs, 10, 12);
  REQUIRE(pts.size() == 6);
  CHECK(pts[0].band == "402mhz");
  CHECK(pts[5].payload_bytes == 12);
  const auto csv = efficiency_csv(pts);
  CHECK(csv.rfind(std::string(kEfficiencyCsvHeader), 0) == 0);
  CHECK(csv.find("402mhz,303.6,10,") != std::string::npos);
  const auto back = efficiency_from_csv(csv);
  REQUIRE(back.size() == 6);
  CHECK(back[3].efficiency == doctest::Approx(pts[3].efficiency).epsilon(1e-4));
  CHECK(efficiency_csv(back) == csv);
}
