#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "bansim/error.hpp"
#include "bansim/fec.hpp"
#include "bansim/phy.hpp"

using namespace bansim;

namespace {

struct Row {
  const char* name;
  double ksps;
  int bits;
  int n, k;
  int spread;
  double published;
};

// Printed table, with the shared 2360/2400 MHz group split into both bands.
const Row kRows[] = {
    {"402mhz-hdr", 187.5, 1, 31, 19, 2, 57.5},  {"402mhz-r0", 187.5, 1, 63, 51, 2, 75.9},
    {"402mhz-r1", 187.5, 2, 63, 51, 1, 303.6},  {"420mhz-hdr", 187.5, 1, 31, 19, 2, 57.5},
    {"420mhz-r0", 187.5, 1, 63, 51, 2, 75.9},   {"420mhz-r1", 187.5, 1, 63, 51, 1, 151.8},
    {"863mhz-hdr", 250, 1, 31, 19, 2, 76.6},    {"863mhz-r0", 250, 1, 63, 51, 2, 101.2},
    {"863mhz-r1", 250, 2, 63, 51, 1, 404.8},    {"902mhz-hdr", 300, 1, 31, 19, 2, 91.9},
    {"902mhz-r0", 300, 1, 63, 51, 2, 121.4},    {"902mhz-r1", 300, 2, 63, 51, 1, 485.7},
    {"950mhz-hdr", 250, 1, 31, 19, 2, 76.6},    {"950mhz-r0", 250, 1, 63, 51, 2, 101.2},
    {"950mhz-r1", 250, 2, 63, 51, 1, 404.8},    {"2360mhz-hdr", 600, 1, 31, 19, 4, 91.9},
    {"2360mhz-r0", 600, 1, 63, 51, 4, 121.4},   {"2360mhz-r1", 600, 1, 63, 51, 1, 485.7},
    {"2400mhz-hdr", 600, 1, 31, 19, 4, 91.9},   {"2400mhz-r0", 600, 1, 63, 51, 4, 121.4},
    {"2400mhz-r1", 600, 1, 63, 51, 1, 485.7},
};

// Push whole codewords through the coder and spreader and time the result.
double measured_rate(const PhyConfig& cfg) {
  const auto code = cfg.payload_code();
  const std::size_t info_bits = static_cast<std::size_t>(code.k) * 200;
  Bits info(info_bits, 0);
  for (std::size_t i = 0; i < info.size(); ++i) info[i] = static_cast<std::uint8_t>((i * 7 + 3) % 5 == 0);
  const auto coded = fec_encode(info, code, *default_parity());
  const auto chips = spread(coded, cfg.spreading);
  const double symbols = static_cast<double>(chips.size()) / bits_per_symbol(cfg.modulation);
  const double seconds = symbols / (cfg.symbol_rate_ksps * 1000.0);
  return static_cast<double>(info_bits) / seconds / 1000.0;
}

}  // namespace

TEST_CASE("table rows: closed form, published value and coded bit count agree") {
  const auto table = rate_table_configs();
  REQUIRE(table.size() == 21);
  for (std::size_t i = 0; i < table.size(); ++i) {
    const auto& row = kRows[i];
    const auto& cfg = table[i];
    CAPTURE(row.name);
    CHECK(cfg.name == row.name);
    const double closed = row.ksps * row.bits * row.k / row.n / row.spread;
    CHECK(row_rate(cfg) == doctest::Approx(closed).epsilon(1e-12));
    CHECK(std::abs(row_rate(cfg) - row.published) < 0.1);
    CHECK(measured_rate(cfg) == doctest::Approx(closed).epsilon(1e-9));
    CHECK(published_rates()[i] == doctest::Approx(row.published));
  }
}

TEST_CASE("override rate wins over derived rate") {
  const auto reg = PhyRegistry::builtin();
  const auto& hi = reg.find(kHighRateOverrideName);
  CHECK(row_rate(hi) == doctest::Approx(971.4));
  CHECK(reg.find(kLowRateReferenceName).symbol_rate_ksps == doctest::Approx(187.5));
}

TEST_CASE("bad configurations are rejected") {
  auto cfg = PhyRegistry::builtin().find("402mhz-r0");
  cfg.spreading = 3;
  CHECK_THROWS_AS(validate(cfg), Error);
  cfg = PhyRegistry::builtin().find("402mhz-r0");
  cfg.symbol_rate_ksps = 0;
  CHECK_THROWS_AS(validate(cfg), Error);
  cfg = PhyRegistry::builtin().find("402mhz-r0");
  cfg.psdu_fec = {51, 63};
  CHECK_THROWS_AS(validate(cfg), Error);
  CHECK_THROWS_AS(PhyRegistry::builtin().find("nope"), Error);
}

TEST_CASE("rate CSV round trips through the registry") {
  const auto reg = PhyRegistry::builtin();
  const auto csv = phy_configs_to_csv(reg.configs());
  const auto back = phy_configs_from_csv(csv);
  REQUIRE(back.size() == reg.configs().size());
  for (std::size_t i = 0; i < back.size(); ++i) {
    CAPTURE(back[i].name);
    CHECK(back[i].name == reg.configs()[i].name);
    CHECK(row_rate(back[i]) == doctest::Approx(row_rate(reg.configs()[i])));
    CHECK(back[i].spreading == reg.configs()[i].spreading);
    CHECK(back[i].modulation == reg.configs()[i].modulation);
  }
  CHECK(phy_configs_to_csv(back) == csv);
}

TEST_CASE("registry override directory") {
  const auto dir = std::filesystem::temp_directory_path() / "bansim_cfg_test";
  std::filesystem::create_directories(dir);
  auto configs = PhyRegistry::builtin().configs();
  configs.resize(2);
  configs[1].symbol_rate_ksps = 375;
  std::ofstream(dir / "phy_configs.csv") << phy_configs_to_csv(configs);
  ::setenv("BANSIM_CONFIG_DIR", dir.c_str(), 1);
  const auto reg = PhyRegistry::from_environment();
  ::unsetenv("BANSIM_CONFIG_DIR");
  CHECK(reg.configs().size() == 2);
  CHECK(row_rate(reg.find("402mhz-r0")) == doctest::Approx(151.8).epsilon(1e-3));
  std::filesystem::remove_all(dir);
}

TEST_CASE("UWB channel plan") {
  CHECK(uwb_channel(2).band == Band::UwbLow);
  CHECK(uwb_channel(7).band == Band::UwbHigh);
  CHECK_THROWS_AS(uwb_channel(99), Error);
}
