#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace bansim {

enum class PhyFamily { Narrowband, Uwb, Hbc };

enum class Band {
  Mics402,   // 402-405 MHz
  Wmts420,   // 420-450 MHz
  Ism863,    // 863-870 MHz
  Ism902,    // 902-928 MHz
  Ism950,    // 950-956 MHz
  Ism2360,   // 2360-2400 MHz
  Ism2400,   // 2400-2483.5 MHz
  UwbLow,
  UwbHigh,
  Hbc16,
  Hbc27,
};

enum class Modulation { Dbpsk, Dqpsk, D8psk, Gmsk, UwbGeneric, Efc };

enum class Component { Header, Psdu };

struct CodeRate {
  int n = 63;
  int k = 51;
  friend bool operator==(const CodeRate&, const CodeRate&) = default;
};

inline constexpr CodeRate kHeaderCode{31, 19};
inline constexpr CodeRate kPsduCode{63, 51};

struct BandInfo {
  Band band;
  std::string_view key;  // short identifier used in config names and CSV
  std::string_view label;
  PhyFamily family;
  double center_freq_mhz;
  double bandwidth_mhz;
  // Beacons are suppressed in bands where regulation forbids them (MICS).
  bool beacon_prohibited;
};

const BandInfo& band_info(Band band);
std::span<const BandInfo> all_bands();
Band parse_band(std::string_view key);

std::string_view to_string(Modulation m);
Modulation parse_modulation(std::string_view name);
std::string_view to_string(Component c);
Component parse_component(std::string_view name);

/// Number of coded bits carried by one channel symbol.
int bits_per_symbol(Modulation m);

/// One row of the modulation/coding table plus the band's header parameters,
/// which is everything needed to frame and time a PPDU.
///
/// `component` says which table row the configuration reproduces. A header
/// row, used as a frame configuration, sends its PSDU with the row's own
/// modulation, code and spreading.
struct PhyConfig {
  std::string name;
  Band band = Band::Mics402;
  Component component = Component::Psdu;
  Modulation modulation = Modulation::Dbpsk;
  double symbol_rate_ksps = 187.5;
  CodeRate header_fec = kHeaderCode;
  CodeRate psdu_fec = kPsduCode;
  int spreading = 1;
  Modulation header_modulation = Modulation::Dbpsk;
  int header_spreading = 2;
  double center_freq_mhz = 403.5;
  double channel_bandwidth_mhz = 3.0;
  // Rate entered directly when it cannot be derived from the table fields.
  std::optional<double> rate_override_kbps;
  int rate_index = 0;

  PhyFamily family() const { return band_info(band).family; }
  /// Code protecting the PSDU under this configuration.
  CodeRate payload_code() const { return component == Component::Header ? header_fec : psdu_fec; }
};

/// Information data rate in Kbps:
/// symbol rate x bits per symbol x k/n / spreading.
double info_data_rate(const PhyConfig& cfg, Component component);

/// The rate this configuration's table row lists.
inline double row_rate(const PhyConfig& cfg) { return info_data_rate(cfg, cfg.component); }

/// Checks the structural invariants of a configuration; throws invalid-config.
void validate(const PhyConfig& cfg);

/// The 21 rows of the NB modulation table, in table order.
std::vector<PhyConfig> rate_table_configs();

/// Paired with `rate_table_configs()`: the published rate for each row (Kbps).
std::vector<double> published_rates();

/// Table rows plus the 971.4 Kbps override and UWB/HBC defaults.
std::vector<PhyConfig> builtin_configs();

/// Name of the 971.4 Kbps override configuration.
inline constexpr std::string_view kHighRateOverrideName = "2400mhz-971";
/// Name of the 187.5 ksps row used as the low-rate efficiency reference.
inline constexpr std::string_view kLowRateReferenceName = "420mhz-r1";

class PhyRegistry {
 public:
  explicit PhyRegistry(std::vector<PhyConfig> configs);

  static PhyRegistry builtin();
  /// Loads `phy_configs.csv` from `$BANSIM_CONFIG_DIR` when set, else builtin.
  static PhyRegistry from_environment();

  const PhyConfig& find(std::string_view name) const;
  const PhyConfig* try_find(std::string_view name) const;
  const std::vector<PhyConfig>& configs() const { return configs_; }

 private:
  std::vector<PhyConfig> configs_;
};

/// Machine-readable rate table. Columns:
/// name,band,component,modulation,symbol_rate_ksps,fec_n,fec_k,spreading,
/// header_modulation,header_spreading,center_mhz,bandwidth_mhz,
/// rate_override_kbps,rate_index,rate_kbps
std::string phy_configs_to_csv(std::span<const PhyConfig> configs);
std::vector<PhyConfig> phy_configs_from_csv(std::string_view text);

/// Human-readable rate table with rates at one decimal.
std::string rate_table_text(std::span<const PhyConfig> configs);

struct UwbChannel {
  int id;
  double center_freq_mhz;
  bool mandatory;
  Band band;  // UwbLow for 1-3, UwbHigh for 4-11
};

inline constexpr double kUwbChannelBandwidthMhz = 499.2;
inline constexpr double kHbcBandwidthMhz = 4.0;

UwbChannel uwb_channel(int id);

}  // namespace bansim
