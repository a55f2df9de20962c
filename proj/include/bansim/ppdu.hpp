#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "bansim/bits.hpp"
#include "bansim/fec.hpp"
#include "bansim/phy.hpp"

namespace bansim {

using Duration = std::chrono::duration<double, std::micro>;

inline constexpr std::size_t kMacHeaderBytes = 7;
inline constexpr std::size_t kFcsBytes = 2;
inline constexpr std::size_t kMaxBodyBytes = 255;

/// Fixed patterns and pluggable pieces shared by all three PPDU codecs.
struct FrameFormat {
  /// NB PLCP preamble: the 63-bit m-sequence of x^6 + x + 1 followed by its
  /// first 27 bits (90 bits).
  Bits nb_preamble;
  /// Number of 63-chip Kasami repetitions in the UWB SHR preamble.
  int uwb_preamble_repetitions = 16;
  int uwb_kasami_index = 0;
  /// UWB SFD: four Kasami symbols; 1 keeps the sequence, 0 inverts it.
  Bits uwb_sfd_signs{0, 0, 1, 0};
  /// HBC preamble (sent four times) and SFD (sent once), 32 bits each.
  Bits hbc_preamble;
  Bits hbc_sfd;
  Crc16Params fcs;
  std::shared_ptr<const ParityGenerator> parity = default_parity();

  static const FrameFormat& defaults();
};

inline constexpr int kHbcPreambleRepetitions = 4;

/// PHY service data unit: MAC header, frame body and frame check sequence.
struct Psdu {
  Bytes mac_header;
  Bytes body;
  std::uint16_t fcs = 0;

  Bytes info_bytes() const;  // header || body || fcs, FCS big-endian
  friend bool operator==(const Psdu&, const Psdu&) = default;
};

struct NbPlcpHeader {
  std::uint8_t rate_index = 0;   // 3 bits
  std::uint8_t body_length = 0;  // 8 bits
  bool burst_mode = false;
  bool scrambler_seed = false;
  std::uint8_t hcs = 0;  // 4-bit CRC over the 15 preceding bits
  friend bool operator==(const NbPlcpHeader&, const NbPlcpHeader&) = default;
};

struct NbPpdu {
  NbPlcpHeader header;
  Psdu psdu;
  Bits bits;
};

struct UwbPhr {
  std::uint8_t rate_index = 0;      // 4 bits
  std::uint8_t body_length = 0;     // 8 bits
  std::uint8_t scrambler_seed = 0;  // 2 bits
  std::uint8_t hcs = 0;             // CRC-8 over the two field bytes
  friend bool operator==(const UwbPhr&, const UwbPhr&) = default;
};

struct UwbPpdu {
  int preamble_repetitions = 0;
  UwbPhr phr;
  Psdu psdu;
  Bits bits;
};

struct HbcHeader {
  std::uint8_t rate_index = 0;   // 3 bits
  std::uint8_t body_length = 0;  // 8 bits
  std::uint8_t hcs = 0;          // CRC-8 over the two field bytes
  friend bool operator==(const HbcHeader&, const HbcHeader&) = default;
};

struct HbcPpdu {
  int preamble_repetitions = 0;
  HbcHeader header;
  Psdu psdu;
  Bits bits;
};

using Ppdu = std::variant<NbPpdu, UwbPpdu, HbcPpdu>;

struct FrameOptions {
  bool burst_mode = false;
  std::uint8_t scrambler_seed = 0;  // NB uses the low bit, UWB the low two
};

struct ParseOptions {
  /// Accept up to 7 trailing zero bits, as left by packing into bytes.
  bool allow_byte_padding = false;
};

NbPpdu build_nb_ppdu(const PhyConfig& cfg, std::span<const std::uint8_t> mac_header,
                     std::span<const std::uint8_t> body, const FrameOptions& opts = {},
                     const FrameFormat& fmt = FrameFormat::defaults());
NbPpdu parse_nb_ppdu(std::span<const std::uint8_t> bits, const PhyConfig& cfg,
                     const ParseOptions& opts = {}, const FrameFormat& fmt = FrameFormat::defaults());

UwbPpdu build_uwb_ppdu(const PhyConfig& cfg, std::span<const std::uint8_t> mac_header,
                       std::span<const std::uint8_t> body, const FrameOptions& opts = {},
                       const FrameFormat& fmt = FrameFormat::defaults());
UwbPpdu parse_uwb_ppdu(std::span<const std::uint8_t> bits, const PhyConfig& cfg,
                       const ParseOptions& opts = {}, const FrameFormat& fmt = FrameFormat::defaults());

HbcPpdu build_hbc_ppdu(const PhyConfig& cfg, std::span<const std::uint8_t> mac_header,
                       std::span<const std::uint8_t> body, const FrameOptions& opts = {},
                       const FrameFormat& fmt = FrameFormat::defaults());
HbcPpdu parse_hbc_ppdu(std::span<const std::uint8_t> bits, const PhyConfig& cfg,
                       const ParseOptions& opts = {}, const FrameFormat& fmt = FrameFormat::defaults());

/// Dispatch on `cfg.family()`.
Ppdu build_ppdu(const PhyConfig& cfg, std::span<const std::uint8_t> mac_header,
                std::span<const std::uint8_t> body, const FrameOptions& opts = {},
                const FrameFormat& fmt = FrameFormat::defaults());
Ppdu parse_ppdu(std::span<const std::uint8_t> bits, const PhyConfig& cfg, const ParseOptions& opts = {},
                const FrameFormat& fmt = FrameFormat::defaults());

const Bits& ppdu_bits(const Ppdu& ppdu);
const Psdu& ppdu_psdu(const Ppdu& ppdu);
PhyFamily ppdu_family(const Ppdu& ppdu);

/// Serialized PSDU length in bits: whole codewords times spreading.
std::size_t psdu_bit_count(const PhyConfig& cfg, std::size_t body_bytes);

/// A named bit range of a serialized PPDU, in transmission order.
struct FieldSpan {
  std::string name;
  std::size_t bit_offset;
  std::size_t bit_length;
};

std::vector<FieldSpan> field_layout(const PhyConfig& cfg, std::size_t body_bytes,
                                    const FrameFormat& fmt = FrameFormat::defaults());

struct Airtime {
  Duration preamble{0};
  Duration header{0};
  Duration psdu{0};
  Duration total() const { return preamble + header + psdu; }
};

/// Airtime of a built PPDU, whole codewords included; throws phy-mismatch
/// when `cfg` is another PHY.
Airtime ppdu_airtime(const Ppdu& ppdu, const PhyConfig& cfg, const FrameFormat& fmt = FrameFormat::defaults());

/// Timing model: the code is treated as a rate expansion of n/k, so the
/// final partial codeword costs only its share. Used by the efficiency
/// model and the simulator.
Airtime frame_airtime(const PhyConfig& cfg, std::size_t body_bytes,
                      const FrameFormat& fmt = FrameFormat::defaults());

/// Annotated dump, 16 bytes per line: `offset: hex bytes | fields`.
std::string hexdump(const Ppdu& ppdu, const PhyConfig& cfg, const FrameFormat& fmt = FrameFormat::defaults());

/// Accepts plain hex or `hexdump` output (offsets and annotations ignored).
Bytes parse_hex(std::string_view text);

}  // namespace bansim
