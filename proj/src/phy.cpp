#include "bansim/phy.hpp"

#include <array>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "bansim/error.hpp"
#include "bansim/format.hpp"

namespace bansim {
namespace {

constexpr std::array<BandInfo, 11> kBands{{
    {Band::Mics402, "402mhz", "402-405 MHz", PhyFamily::Narrowband, 403.5, 3.0, true},
    {Band::Wmts420, "420mhz", "420-450 MHz", PhyFamily::Narrowband, 435.0, 30.0, false},
    {Band::Ism863, "863mhz", "863-870 MHz", PhyFamily::Narrowband, 866.5, 7.0, false},
    {Band::Ism902, "902mhz", "902-928 MHz", PhyFamily::Narrowband, 915.0, 26.0, false},
    {Band::Ism950, "950mhz", "950-956 MHz", PhyFamily::Narrowband, 953.0, 6.0, false},
    {Band::Ism2360, "2360mhz", "2360-2400 MHz", PhyFamily::Narrowband, 2380.0, 40.0, false},
    {Band::Ism2400, "2400mhz", "2400-2483.5 MHz", PhyFamily::Narrowband, 2441.75, 83.5, false},
    {Band::UwbLow, "uwb-low", "UWB low band", PhyFamily::Uwb, 3993.6, kUwbChannelBandwidthMhz, false},
    {Band::UwbHigh, "uwb-high", "UWB high band", PhyFamily::Uwb, 7987.2, kUwbChannelBandwidthMhz, false},
    {Band::Hbc16, "hbc16", "HBC 16 MHz", PhyFamily::Hbc, 16.0, kHbcBandwidthMhz, false},
    {Band::Hbc27, "hbc27", "HBC 27 MHz", PhyFamily::Hbc, 27.0, kHbcBandwidthMhz, false},
}};

struct BandRates {
  Band band;
  double symbol_rate;
  Modulation header_mod;
  int header_spreading;
  Modulation r0_mod;
  int r0_spreading;
  Modulation r1_mod;
  int r1_spreading;
  double published[3];
};

// Spreading factors reproduce the published rates; see the rate-table tests.
constexpr std::array<BandRates, 7> kNbRows{{
    {Band::Mics402, 187.5, Modulation::Dbpsk, 2, Modulation::Dbpsk, 2, Modulation::Dqpsk, 1, {57.5, 75.9, 303.6}},
    {Band::Wmts420, 187.5, Modulation::Gmsk, 2, Modulation::Gmsk, 2, Modulation::Gmsk, 1, {57.5, 75.9, 151.8}},
    {Band::Ism863, 250.0, Modulation::Dbpsk, 2, Modulation::Dbpsk, 2, Modulation::Dqpsk, 1, {76.6, 101.2, 404.8}},
    {Band::Ism902, 300.0, Modulation::Dbpsk, 2, Modulation::Dbpsk, 2, Modulation::Dqpsk, 1, {91.9, 121.4, 485.7}},
    {Band::Ism950, 250.0, Modulation::Dbpsk, 2, Modulation::Dbpsk, 2, Modulation::Dqpsk, 1, {76.6, 101.2, 404.8}},
    // The table labels the high-rate 2.4 GHz row pi/2-DBPSK; its rate only
    // works out with spreading 1, so the label is kept as published.
    {Band::Ism2360, 600.0, Modulation::Dbpsk, 4, Modulation::Dbpsk, 4, Modulation::Dbpsk, 1, {91.9, 121.4, 485.7}},
    {Band::Ism2400, 600.0, Modulation::Dbpsk, 4, Modulation::Dbpsk, 4, Modulation::Dbpsk, 1, {91.9, 121.4, 485.7}},
}};

PhyConfig make_row(const BandRates& row, Component component, Modulation mod, int spreading,
                   int rate_index, std::string suffix) {
  const auto& info = band_info(row.band);
  PhyConfig cfg;
  cfg.name = std::string(info.key) + "-" + suffix;
  cfg.band = row.band;
  cfg.component = component;
  cfg.modulation = mod;
  cfg.symbol_rate_ksps = row.symbol_rate;
  cfg.spreading = spreading;
  cfg.header_modulation = row.header_mod;
  cfg.header_spreading = row.header_spreading;
  cfg.center_freq_mhz = info.center_freq_mhz;
  cfg.channel_bandwidth_mhz = info.bandwidth_mhz;
  cfg.rate_index = rate_index;
  return cfg;
}

PhyConfig make_generic(Band band, Modulation mod, double symbol_rate, std::string name) {
  const auto& info = band_info(band);
  PhyConfig cfg;
  cfg.name = std::move(name);
  cfg.band = band;
  cfg.component = Component::Psdu;
  cfg.modulation = mod;
  cfg.symbol_rate_ksps = symbol_rate;
  cfg.spreading = 1;
  cfg.header_modulation = mod;
  cfg.header_spreading = 1;
  cfg.center_freq_mhz = info.center_freq_mhz;
  cfg.channel_bandwidth_mhz = info.bandwidth_mhz;
  return cfg;
}

bool nearly(double a, double b) { return std::abs(a - b) <= 1e-9 * std::max(1.0, std::abs(b)); }

}  // namespace

const BandInfo& band_info(Band band) {
  for (const auto& b : kBands) {
    if (b.band == band) return b;
  }
  throw Error(Errc::InvalidConfig, "unknown band");
}

std::span<const BandInfo> all_bands() { return kBands; }

Band parse_band(std::string_view key) {
  for (const auto& b : kBands) {
    if (b.key == key) return b.band;
  }
  throw Error(Errc::InvalidConfig, "unknown band '" + std::string(key) + "'");
}

std::string_view to_string(Modulation m) {
  switch (m) {
    case Modulation::Dbpsk: return "pi/2-dbpsk";
    case Modulation::Dqpsk: return "pi/4-dqpsk";
    case Modulation::D8psk: return "pi/8-d8psk";
    case Modulation::Gmsk: return "gmsk";
    case Modulation::UwbGeneric: return "uwb";
    case Modulation::Efc: return "efc";
  }
  throw Error(Errc::InvalidConfig, "unknown modulation");
}

Modulation parse_modulation(std::string_view name) {
  for (auto m : {Modulation::Dbpsk, Modulation::Dqpsk, Modulation::D8psk, Modulation::Gmsk,
                 Modulation::UwbGeneric, Modulation::Efc}) {
    if (to_string(m) == name) return m;
  }
  throw Error(Errc::InvalidConfig, "unknown modulation '" + std::string(name) + "'");
}

std::string_view to_string(Component c) { return c == Component::Header ? "header" : "psdu"; }

Component parse_component(std::string_view name) {
  if (name == "header") return Component::Header;
  if (name == "psdu") return Component::Psdu;
  throw Error(Errc::InvalidConfig, "unknown packet component '" + std::string(name) + "'");
}

int bits_per_symbol(Modulation m) {
  switch (m) {
    case Modulation::Dbpsk:
    case Modulation::Gmsk:
    case Modulation::UwbGeneric:
    case Modulation::Efc:
      return 1;
    case Modulation::Dqpsk:
      return 2;
    case Modulation::D8psk:
      return 3;
  }
  throw Error(Errc::InvalidConfig, "unknown modulation");
}

double info_data_rate(const PhyConfig& cfg, Component component) {
  if (component == Component::Header) {
    if (cfg.header_spreading < 1) throw Error(Errc::InvalidConfig, cfg.name + ": header spreading < 1");
    return cfg.symbol_rate_ksps * bits_per_symbol(cfg.header_modulation) * cfg.header_fec.k /
           cfg.header_fec.n / cfg.header_spreading;
  }
  if (cfg.rate_override_kbps) return *cfg.rate_override_kbps;
  if (cfg.spreading < 1) throw Error(Errc::InvalidConfig, cfg.name + ": spreading < 1");
  const auto code = cfg.payload_code();
  return cfg.symbol_rate_ksps * bits_per_symbol(cfg.modulation) * code.k / code.n / cfg.spreading;
}

void validate(const PhyConfig& cfg) {
  auto fail = [&](const std::string& why) { throw Error(Errc::InvalidConfig, cfg.name + ": " + why); };
  (void)bits_per_symbol(cfg.modulation);
  (void)bits_per_symbol(cfg.header_modulation);
  for (int s : {cfg.spreading, cfg.header_spreading}) {
    if (s != 1 && s != 2 && s != 4) fail("spreading must be 1, 2 or 4");
  }
  if (cfg.header_fec != kHeaderCode) fail("header code must be BCH(31,19)");
  if (cfg.psdu_fec != kPsduCode) fail("PSDU code must be BCH(63,51)");
  if (!(cfg.symbol_rate_ksps > 0.0)) fail("symbol rate must be positive");
  if (cfg.rate_override_kbps && !(*cfg.rate_override_kbps > 0.0)) fail("rate override must be positive");
  if (cfg.rate_index < 0 || cfg.rate_index > 7) fail("rate index must be 0..7");
  const auto family = cfg.family();
  if (family == PhyFamily::Uwb && !nearly(cfg.channel_bandwidth_mhz, kUwbChannelBandwidthMhz)) {
    fail("UWB channels are 499.2 MHz wide");
  }
  if (family == PhyFamily::Hbc && !nearly(cfg.channel_bandwidth_mhz, kHbcBandwidthMhz)) {
    fail("HBC channels are 4 MHz wide");
  }
}

std::vector<PhyConfig> rate_table_configs() {
  std::vector<PhyConfig> rows;
  rows.reserve(21);
  for (const auto& r : kNbRows) {
    rows.push_back(make_row(r, Component::Header, r.header_mod, r.header_spreading, 0, "hdr"));
    rows.push_back(make_row(r, Component::Psdu, r.r0_mod, r.r0_spreading, 0, "r0"));
    rows.push_back(make_row(r, Component::Psdu, r.r1_mod, r.r1_spreading, 1, "r1"));
  }
  return rows;
}

std::vector<double> published_rates() {
  std::vector<double> rates;
  for (const auto& r : kNbRows) rates.insert(rates.end(), std::begin(r.published), std::end(r.published));
  return rates;
}

std::vector<PhyConfig> builtin_configs() {
  auto configs = rate_table_configs();

  // 971.4 Kbps is not derivable from the table; D8PSK at 600 ksps would give
  // 1457 Kbps, so the rate is entered as an override.
  PhyConfig high = make_row(kNbRows[6], Component::Psdu, Modulation::D8psk, 1, 2, "971");
  high.name = std::string(kHighRateOverrideName);
  high.rate_override_kbps = 971.4;
  configs.push_back(high);

  // UWB mandatory rate 488.2 Kbps and HBC 164 Kbps, with the symbol rate
  // back-computed through the (63,51) code.
  configs.push_back(make_generic(Band::UwbLow, Modulation::UwbGeneric, 603.1, "uwb-low"));
  configs.push_back(make_generic(Band::UwbHigh, Modulation::UwbGeneric, 603.1, "uwb-high"));
  configs.push_back(make_generic(Band::Hbc16, Modulation::Efc, 202.6, "hbc16"));
  configs.push_back(make_generic(Band::Hbc27, Modulation::Efc, 202.6, "hbc27"));
  return configs;
}

PhyRegistry::PhyRegistry(std::vector<PhyConfig> configs) : configs_(std::move(configs)) {
  for (std::size_t i = 0; i < configs_.size(); ++i) {
    validate(configs_[i]);
    for (std::size_t j = 0; j < i; ++j) {
      if (configs_[j].name == configs_[i].name) {
        throw Error(Errc::InvalidConfig, "duplicate configuration name '" + configs_[i].name + "'");
      }
    }
  }
}

PhyRegistry PhyRegistry::builtin() { return PhyRegistry(builtin_configs()); }

PhyRegistry PhyRegistry::from_environment() {
  const char* dir = std::getenv("BANSIM_CONFIG_DIR");
  if (dir == nullptr || *dir == '\0') return builtin();
  const auto path = std::filesystem::path(dir) / "phy_configs.csv";
  std::ifstream in(path);
  if (!in) throw Error(Errc::InvalidConfig, "cannot read " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return PhyRegistry(phy_configs_from_csv(buffer.str()));
}

const PhyConfig* PhyRegistry::try_find(std::string_view name) const {
  for (const auto& c : configs_) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

const PhyConfig& PhyRegistry::find(std::string_view name) const {
  if (const auto* c = try_find(name)) return *c;
  throw Error(Errc::InvalidConfig, "unknown PHY configuration '" + std::string(name) + "'");
}

namespace {
constexpr std::string_view kCsvHeader =
    "name,band,component,modulation,symbol_rate_ksps,fec_n,fec_k,spreading,header_modulation,"
    "header_spreading,center_mhz,bandwidth_mhz,rate_override_kbps,rate_index,rate_kbps";
}

std::string phy_configs_to_csv(std::span<const PhyConfig> configs) {
  std::string out(kCsvHeader);
  out += '\n';
  for (const auto& c : configs) {
    const auto code = c.payload_code();
    out += c.name + ',' + std::string(band_info(c.band).key) + ',' + std::string(to_string(c.component)) +
           ',' + std::string(to_string(c.modulation)) + ',' + shortest(c.symbol_rate_ksps) + ',' +
           std::to_string(code.n) + ',' + std::to_string(code.k) + ',' + std::to_string(c.spreading) + ',' +
           std::string(to_string(c.header_modulation)) + ',' + std::to_string(c.header_spreading) + ',' +
           shortest(c.center_freq_mhz) + ',' + shortest(c.channel_bandwidth_mhz) + ',' +
           (c.rate_override_kbps ? shortest(*c.rate_override_kbps) : std::string()) + ',' +
           std::to_string(c.rate_index) + ',' + fixed(row_rate(c), 1) + '\n';
  }
  return out;
}

std::vector<PhyConfig> phy_configs_from_csv(std::string_view text) {
  std::vector<PhyConfig> configs;
  int line_no = 0;
  bool header_seen = false;
  for (auto line : split(text, '\n')) {
    ++line_no;
    line = trim(line);
    if (line.empty() || line.starts_with('#')) continue;
    if (!header_seen) {
      if (line != kCsvHeader) throw Error(Errc::InvalidConfig, "line 1: unexpected CSV header");
      header_seen = true;
      continue;
    }
    const auto f = split(line, ',');
    if (f.size() != 15) {
      throw Error(Errc::InvalidConfig, "line " + std::to_string(line_no) + ": expected 15 fields");
    }
    try {
      PhyConfig c;
      c.name = std::string(trim(f[0]));
      c.band = parse_band(trim(f[1]));
      c.component = parse_component(trim(f[2]));
      c.modulation = parse_modulation(trim(f[3]));
      c.symbol_rate_ksps = parse_double(f[4]);
      const CodeRate code{static_cast<int>(parse_int(f[5])), static_cast<int>(parse_int(f[6]))};
      if (c.component == Component::Header) {
        c.header_fec = code;
      } else {
        c.psdu_fec = code;
      }
      c.spreading = static_cast<int>(parse_int(f[7]));
      c.header_modulation = parse_modulation(trim(f[8]));
      c.header_spreading = static_cast<int>(parse_int(f[9]));
      c.center_freq_mhz = parse_double(f[10]);
      c.channel_bandwidth_mhz = parse_double(f[11]);
      if (!trim(f[12]).empty()) c.rate_override_kbps = parse_double(f[12]);
      c.rate_index = static_cast<int>(parse_int(f[13]));
      validate(c);
      configs.push_back(std::move(c));
    } catch (const Error& e) {
      throw Error(e.code(), "line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return configs;
}

std::string rate_table_text(std::span<const PhyConfig> configs) {
  std::ostringstream out;
  auto pad = [](std::string s, std::size_t w) {
    if (s.size() < w) s.append(w - s.size(), ' ');
    return s;
  };
  out << pad("Configuration", 16) << pad("Band", 18) << pad("Component", 11) << pad("Modulation", 13)
      << pad("Symbol rate", 13) << pad("BCH (n,k)", 11) << pad("Spread", 8) << "Rate (Kbps)\n";
  for (const auto& c : configs) {
    const auto code = c.payload_code();
    out << pad(c.name, 16) << pad(std::string(band_info(c.band).label), 18)
        << pad(std::string(to_string(c.component)), 11) << pad(std::string(to_string(c.modulation)), 13)
        << pad(fixed(c.symbol_rate_ksps, 1), 13)
        << pad("(" + std::to_string(code.n) + "," + std::to_string(code.k) + ")", 11)
        << pad(std::to_string(c.spreading), 8) << fixed(row_rate(c), 1) << '\n';
  }
  return out.str();
}

UwbChannel uwb_channel(int id) {
  if (id < 1 || id > 11) throw Error(Errc::OutOfRange, "UWB channel must be 1..11");
  // Channels sit on a 499.2 MHz grid; the low band (1-3) and high band (4-11)
  // are separated by a gap of two grid positions.
  const int grid = id <= 3 ? id + 6 : id + 9;
  return UwbChannel{id, grid * kUwbChannelBandwidthMhz, id == 2 || id == 7,
                    id <= 3 ? Band::UwbLow : Band::UwbHigh};
}

}  // namespace bansim
