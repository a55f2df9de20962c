#include "bansim/ppdu.hpp"

#include <algorithm>
#include <cctype>

#include "bansim/error.hpp"
#include "bansim/format.hpp"
#include "bansim/kasami.hpp"

namespace bansim {
namespace {

constexpr std::size_t kNbHeaderInfoBits = 19;  // 15 field bits + 4-bit HCS
constexpr std::size_t kPhrInfoBits = 24;       // 16 field bits + CRC-8
constexpr std::uint32_t kHbcPreamble = 0x3C5A96E1;
constexpr std::uint32_t kHbcSfd = 0xD21E47B8;

FrameFormat make_default_format() {
  FrameFormat fmt;
  const auto m = msequence63();
  fmt.nb_preamble.assign(m.begin(), m.end());
  fmt.nb_preamble.insert(fmt.nb_preamble.end(), m.begin(), m.begin() + 27);
  append_uint(fmt.hbc_preamble, kHbcPreamble, 32);
  append_uint(fmt.hbc_sfd, kHbcSfd, 32);
  return fmt;
}

void check_family(const PhyConfig& cfg, PhyFamily expected) {
  if (cfg.family() != expected) throw Error(Errc::PhyMismatch, cfg.name + " is not a configuration for this PHY");
}

Psdu make_psdu(std::span<const std::uint8_t> mac_header, std::span<const std::uint8_t> body,
               const FrameFormat& fmt) {
  if (mac_header.size() != kMacHeaderBytes) {
    throw Error(Errc::InvalidField, "MAC header must be " + std::to_string(kMacHeaderBytes) + " bytes");
  }
  if (body.size() > kMaxBodyBytes) {
    throw Error(Errc::FrameTooLong, "frame body of " + std::to_string(body.size()) + " bytes exceeds 255");
  }
  Psdu psdu;
  psdu.mac_header.assign(mac_header.begin(), mac_header.end());
  psdu.body.assign(body.begin(), body.end());
  Bytes covered = psdu.mac_header;
  covered.insert(covered.end(), body.begin(), body.end());
  psdu.fcs = crc16(covered, fmt.fcs);
  return psdu;
}

Bits encode_block(std::span<const std::uint8_t> info, CodeRate code, int spreading, const FrameFormat& fmt) {
  return spread(fec_encode(info, code, *fmt.parity), spreading);
}

std::size_t coded_size(std::size_t info_bits, CodeRate code, int spreading) {
  return codeword_count(info_bits, code) * static_cast<std::size_t>(code.n) * static_cast<std::size_t>(spreading);
}

Bits encode_psdu(const PhyConfig& cfg, const Psdu& psdu, const FrameFormat& fmt) {
  Bits info;
  append_bytes(info, psdu.info_bytes());
  return encode_block(info, cfg.payload_code(), cfg.spreading, fmt);
}

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> bits) : bits_(bits) {}

  std::span<const std::uint8_t> take(std::size_t n, const char* what) {
    if (pos_ + n > bits_.size()) throw Error(Errc::TruncatedFrame, std::string("image ends inside ") + what);
    auto out = bits_.subspan(pos_, n);
    pos_ += n;
    return out;
  }

  std::size_t consumed() const { return pos_; }

  void finish(const ParseOptions& opts) const {
    const auto rest = bits_.subspan(pos_);
    if (rest.empty()) return;
    const bool zero_pad = rest.size() < 8 && std::all_of(rest.begin(), rest.end(), [](auto b) { return b == 0; });
    if (!(opts.allow_byte_padding && zero_pad)) {
      throw Error(Errc::TrailingData, std::to_string(rest.size()) + " bits after the PSDU");
    }
  }

 private:
  std::span<const std::uint8_t> bits_;
  std::size_t pos_ = 0;
};

void expect_pattern(std::span<const std::uint8_t> got, std::span<const std::uint8_t> want, Errc err,
                    const std::string& what) {
  if (!std::equal(got.begin(), got.end(), want.begin(), want.end())) throw Error(err, what + " does not match");
}

Bits decode_header(Reader& in, const PhyConfig& cfg, std::size_t info_bits, const FrameFormat& fmt) {
  const auto raw = in.take(coded_size(info_bits, cfg.header_fec, cfg.header_spreading), "header");
  const auto ds = despread(raw, cfg.header_spreading);
  auto dec = fec_decode(ds.bits, info_bits, cfg.header_fec, *fmt.parity);
  if (!ds.consistent || !dec.parity_ok || !dec.padding_ok) {
    throw Error(Errc::HeaderCheckMismatch, "header codeword check failed");
  }
  return std::move(dec.info);
}

Psdu decode_psdu(Reader& in, const PhyConfig& cfg, std::size_t body_length, const ParseOptions& opts,
                 const FrameFormat& fmt) {
  const std::size_t info_bits = (kMacHeaderBytes + body_length + kFcsBytes) * 8;
  const auto code = cfg.payload_code();
  const auto raw = in.take(coded_size(info_bits, code, cfg.spreading), "PSDU");
  in.finish(opts);

  const auto ds = despread(raw, cfg.spreading);
  const auto dec = fec_decode(ds.bits, info_bits, code, *fmt.parity);
  const auto bytes = bits_to_bytes(dec.info);

  Psdu psdu;
  psdu.mac_header.assign(bytes.begin(), bytes.begin() + kMacHeaderBytes);
  psdu.body.assign(bytes.begin() + kMacHeaderBytes, bytes.end() - kFcsBytes);
  psdu.fcs = static_cast<std::uint16_t>((bytes[bytes.size() - 2] << 8) | bytes[bytes.size() - 1]);

  Bytes covered(bytes.begin(), bytes.end() - kFcsBytes);
  if (crc16(covered, fmt.fcs) != psdu.fcs) throw Error(Errc::FcsMismatch, "frame check sequence mismatch");
  if (!dec.parity_ok || !dec.padding_ok) throw Error(Errc::ParityMismatch, "PSDU codeword check failed");
  if (!ds.consistent) throw Error(Errc::SpreadingMismatch, "PSDU spreading repetitions disagree");
  return psdu;
}

Bits uwb_symbol(const FrameFormat& fmt, bool keep) {
  auto chips = kasami63(fmt.uwb_kasami_index);
  if (!keep) {
    for (auto& c : chips) c = static_cast<std::int8_t>(-c);
  }
  return chips_to_bits(chips);
}

Bits uwb_phr_bits(const UwbPhr& phr) {
  Bits bits;
  append_uint(bits, phr.rate_index, 4);
  append_uint(bits, phr.body_length, 8);
  append_uint(bits, phr.scrambler_seed, 2);
  append_uint(bits, 0, 2);
  return bits;
}

Bits hbc_header_bits(const HbcHeader& h) {
  Bits bits;
  append_uint(bits, h.rate_index, 3);
  append_uint(bits, h.body_length, 8);
  append_uint(bits, 0, 5);
  return bits;
}

Bits nb_header_bits(const NbPlcpHeader& h) {
  Bits bits;
  append_uint(bits, h.rate_index, 3);
  append_uint(bits, 0, 1);
  append_uint(bits, h.body_length, 8);
  append_uint(bits, h.burst_mode ? 1 : 0, 1);
  append_uint(bits, h.scrambler_seed ? 1 : 0, 1);
  append_uint(bits, 0, 1);
  return bits;
}

void check_rate_index(int field, const PhyConfig& cfg) {
  if (field != cfg.rate_index) {
    throw Error(Errc::InvalidField, "rate index " + std::to_string(field) + " does not match " + cfg.name);
  }
}

std::size_t preamble_symbols(const PhyConfig& cfg, const FrameFormat& fmt) {
  switch (cfg.family()) {
    case PhyFamily::Narrowband: return fmt.nb_preamble.size();
    case PhyFamily::Uwb: return static_cast<std::size_t>(fmt.uwb_preamble_repetitions) + fmt.uwb_sfd_signs.size();
    case PhyFamily::Hbc: return kHbcPreambleRepetitions * fmt.hbc_preamble.size() + fmt.hbc_sfd.size();
  }
  return 0;
}

std::size_t header_info_bits(const PhyConfig& cfg) {
  return cfg.family() == PhyFamily::Narrowband ? kNbHeaderInfoBits : kPhrInfoBits;
}

}  // namespace

const FrameFormat& FrameFormat::defaults() {
  static const FrameFormat fmt = make_default_format();
  return fmt;
}

Bytes Psdu::info_bytes() const {
  Bytes out = mac_header;
  out.insert(out.end(), body.begin(), body.end());
  out.push_back(static_cast<std::uint8_t>(fcs >> 8));
  out.push_back(static_cast<std::uint8_t>(fcs & 0xFF));
  return out;
}

// ---------------------------------------------------------------- NB

NbPpdu build_nb_ppdu(const PhyConfig& cfg, std::span<const std::uint8_t> mac_header,
                     std::span<const std::uint8_t> body, const FrameOptions& opts, const FrameFormat& fmt) {
  check_family(cfg, PhyFamily::Narrowband);
  NbPpdu ppdu;
  ppdu.psdu = make_psdu(mac_header, body, fmt);
  ppdu.header.rate_index = static_cast<std::uint8_t>(cfg.rate_index);
  ppdu.header.body_length = static_cast<std::uint8_t>(body.size());
  ppdu.header.burst_mode = opts.burst_mode;
  ppdu.header.scrambler_seed = (opts.scrambler_seed & 1U) != 0;

  auto header = nb_header_bits(ppdu.header);
  ppdu.header.hcs = crc4(header);
  append_uint(header, ppdu.header.hcs, 4);

  ppdu.bits = fmt.nb_preamble;
  const auto hdr = encode_block(header, cfg.header_fec, cfg.header_spreading, fmt);
  ppdu.bits.insert(ppdu.bits.end(), hdr.begin(), hdr.end());
  const auto psdu = encode_psdu(cfg, ppdu.psdu, fmt);
  ppdu.bits.insert(ppdu.bits.end(), psdu.begin(), psdu.end());
  return ppdu;
}

NbPpdu parse_nb_ppdu(std::span<const std::uint8_t> bits, const PhyConfig& cfg, const ParseOptions& opts,
                     const FrameFormat& fmt) {
  check_family(cfg, PhyFamily::Narrowband);
  Reader in(bits);
  expect_pattern(in.take(fmt.nb_preamble.size(), "preamble"), fmt.nb_preamble, Errc::PreambleMismatch,
                 "PLCP preamble");

  const auto info = decode_header(in, cfg, kNbHeaderInfoBits, fmt);
  const std::span<const std::uint8_t> fields(info.data(), 15);
  NbPlcpHeader h;
  h.rate_index = static_cast<std::uint8_t>(read_uint(info, 0, 3));
  h.body_length = static_cast<std::uint8_t>(read_uint(info, 4, 8));
  h.burst_mode = read_uint(info, 12, 1) != 0;
  h.scrambler_seed = read_uint(info, 13, 1) != 0;
  h.hcs = static_cast<std::uint8_t>(read_uint(info, 15, 4));
  if (crc4(fields) != h.hcs) throw Error(Errc::HeaderCheckMismatch, "PLCP header check sequence mismatch");
  if (read_uint(info, 3, 1) != 0 || read_uint(info, 14, 1) != 0) {
    throw Error(Errc::InvalidField, "reserved PLCP header bits set");
  }
  check_rate_index(h.rate_index, cfg);

  NbPpdu ppdu;
  ppdu.header = h;
  ppdu.psdu = decode_psdu(in, cfg, h.body_length, opts, fmt);
  ppdu.bits.assign(bits.begin(), bits.begin() + static_cast<std::ptrdiff_t>(in.consumed()));
  return ppdu;
}

// ---------------------------------------------------------------- UWB

UwbPpdu build_uwb_ppdu(const PhyConfig& cfg, std::span<const std::uint8_t> mac_header,
                       std::span<const std::uint8_t> body, const FrameOptions& opts, const FrameFormat& fmt) {
  check_family(cfg, PhyFamily::Uwb);
  if (fmt.uwb_preamble_repetitions < 1) throw Error(Errc::InvalidConfig, "UWB preamble needs a repetition");
  UwbPpdu ppdu;
  ppdu.preamble_repetitions = fmt.uwb_preamble_repetitions;
  ppdu.psdu = make_psdu(mac_header, body, fmt);
  ppdu.phr.rate_index = static_cast<std::uint8_t>(cfg.rate_index);
  ppdu.phr.body_length = static_cast<std::uint8_t>(body.size());
  ppdu.phr.scrambler_seed = static_cast<std::uint8_t>(opts.scrambler_seed & 0x3U);

  const auto symbol = uwb_symbol(fmt, true);
  for (int i = 0; i < fmt.uwb_preamble_repetitions; ++i) ppdu.bits.insert(ppdu.bits.end(), symbol.begin(), symbol.end());
  for (auto sign : fmt.uwb_sfd_signs) {
    const auto s = uwb_symbol(fmt, sign != 0);
    ppdu.bits.insert(ppdu.bits.end(), s.begin(), s.end());
  }

  auto phr = uwb_phr_bits(ppdu.phr);
  ppdu.phr.hcs = crc8(phr);
  append_uint(phr, ppdu.phr.hcs, 8);
  const auto hdr = encode_block(phr, cfg.header_fec, cfg.header_spreading, fmt);
  ppdu.bits.insert(ppdu.bits.end(), hdr.begin(), hdr.end());
  const auto psdu = encode_psdu(cfg, ppdu.psdu, fmt);
  ppdu.bits.insert(ppdu.bits.end(), psdu.begin(), psdu.end());
  return ppdu;
}

UwbPpdu parse_uwb_ppdu(std::span<const std::uint8_t> bits, const PhyConfig& cfg, const ParseOptions& opts,
                       const FrameFormat& fmt) {
  check_family(cfg, PhyFamily::Uwb);
  Reader in(bits);
  const auto symbol = uwb_symbol(fmt, true);
  for (int i = 0; i < fmt.uwb_preamble_repetitions; ++i) {
    expect_pattern(in.take(symbol.size(), "SHR preamble"), symbol, Errc::PreambleMismatch,
                   "SHR preamble repetition " + std::to_string(i + 1));
  }
  for (auto sign : fmt.uwb_sfd_signs) {
    expect_pattern(in.take(symbol.size(), "SFD"), uwb_symbol(fmt, sign != 0), Errc::SfdMismatch, "SFD");
  }

  const auto info = decode_header(in, cfg, kPhrInfoBits, fmt);
  UwbPhr phr;
  phr.rate_index = static_cast<std::uint8_t>(read_uint(info, 0, 4));
  phr.body_length = static_cast<std::uint8_t>(read_uint(info, 4, 8));
  phr.scrambler_seed = static_cast<std::uint8_t>(read_uint(info, 12, 2));
  phr.hcs = static_cast<std::uint8_t>(read_uint(info, 16, 8));
  if (crc8(std::span<const std::uint8_t>(info.data(), 16)) != phr.hcs) {
    throw Error(Errc::HeaderCheckMismatch, "PHR check sequence mismatch");
  }
  if (read_uint(info, 14, 2) != 0) throw Error(Errc::InvalidField, "PHR padding bits set");
  check_rate_index(phr.rate_index, cfg);

  UwbPpdu ppdu;
  ppdu.preamble_repetitions = fmt.uwb_preamble_repetitions;
  ppdu.phr = phr;
  ppdu.psdu = decode_psdu(in, cfg, phr.body_length, opts, fmt);
  ppdu.bits.assign(bits.begin(), bits.begin() + static_cast<std::ptrdiff_t>(in.consumed()));
  return ppdu;
}

// ---------------------------------------------------------------- HBC

HbcPpdu build_hbc_ppdu(const PhyConfig& cfg, std::span<const std::uint8_t> mac_header,
                       std::span<const std::uint8_t> body, const FrameOptions&, const FrameFormat& fmt) {
  check_family(cfg, PhyFamily::Hbc);
  HbcPpdu ppdu;
  ppdu.preamble_repetitions = kHbcPreambleRepetitions;
  ppdu.psdu = make_psdu(mac_header, body, fmt);
  ppdu.header.rate_index = static_cast<std::uint8_t>(cfg.rate_index);
  ppdu.header.body_length = static_cast<std::uint8_t>(body.size());

  for (int i = 0; i < kHbcPreambleRepetitions; ++i) {
    ppdu.bits.insert(ppdu.bits.end(), fmt.hbc_preamble.begin(), fmt.hbc_preamble.end());
  }
  ppdu.bits.insert(ppdu.bits.end(), fmt.hbc_sfd.begin(), fmt.hbc_sfd.end());

  auto header = hbc_header_bits(ppdu.header);
  ppdu.header.hcs = crc8(header);
  append_uint(header, ppdu.header.hcs, 8);
  const auto hdr = encode_block(header, cfg.header_fec, cfg.header_spreading, fmt);
  ppdu.bits.insert(ppdu.bits.end(), hdr.begin(), hdr.end());
  const auto psdu = encode_psdu(cfg, ppdu.psdu, fmt);
  ppdu.bits.insert(ppdu.bits.end(), psdu.begin(), psdu.end());
  return ppdu;
}

HbcPpdu parse_hbc_ppdu(std::span<const std::uint8_t> bits, const PhyConfig& cfg, const ParseOptions& opts,
                       const FrameFormat& fmt) {
  check_family(cfg, PhyFamily::Hbc);
  Reader in(bits);
  for (int i = 0; i < kHbcPreambleRepetitions; ++i) {
    expect_pattern(in.take(fmt.hbc_preamble.size(), "preamble"), fmt.hbc_preamble, Errc::PreambleMismatch,
                   "preamble repetition " + std::to_string(i + 1));
  }
  expect_pattern(in.take(fmt.hbc_sfd.size(), "SFD"), fmt.hbc_sfd, Errc::SfdMismatch, "SFD");

  const auto info = decode_header(in, cfg, kPhrInfoBits, fmt);
  HbcHeader h;
  h.rate_index = static_cast<std::uint8_t>(read_uint(info, 0, 3));
  h.body_length = static_cast<std::uint8_t>(read_uint(info, 3, 8));
  h.hcs = static_cast<std::uint8_t>(read_uint(info, 16, 8));
  if (crc8(std::span<const std::uint8_t>(info.data(), 16)) != h.hcs) {
    throw Error(Errc::HeaderCheckMismatch, "PHY header check sequence mismatch");
  }
  if (read_uint(info, 11, 5) != 0) throw Error(Errc::InvalidField, "PHY header padding bits set");
  check_rate_index(h.rate_index, cfg);

  HbcPpdu ppdu;
  ppdu.preamble_repetitions = kHbcPreambleRepetitions;
  ppdu.header = h;
  ppdu.psdu = decode_psdu(in, cfg, h.body_length, opts, fmt);
  ppdu.bits.assign(bits.begin(), bits.begin() + static_cast<std::ptrdiff_t>(in.consumed()));
  return ppdu;
}

// ---------------------------------------------------------------- common

Ppdu build_ppdu(const PhyConfig& cfg, std::span<const std::uint8_t> mac_header, std::span<const std::uint8_t> body,
                const FrameOptions& opts, const FrameFormat& fmt) {
  switch (cfg.family()) {
    case PhyFamily::Narrowband: return build_nb_ppdu(cfg, mac_header, body, opts, fmt);
    case PhyFamily::Uwb: return build_uwb_ppdu(cfg, mac_header, body, opts, fmt);
    case PhyFamily::Hbc: return build_hbc_ppdu(cfg, mac_header, body, opts, fmt);
  }
  throw Error(Errc::InvalidConfig, "unknown PHY family");
}

Ppdu parse_ppdu(std::span<const std::uint8_t> bits, const PhyConfig& cfg, const ParseOptions& opts,
                const FrameFormat& fmt) {
  switch (cfg.family()) {
    case PhyFamily::Narrowband: return parse_nb_ppdu(bits, cfg, opts, fmt);
    case PhyFamily::Uwb: return parse_uwb_ppdu(bits, cfg, opts, fmt);
    case PhyFamily::Hbc: return parse_hbc_ppdu(bits, cfg, opts, fmt);
  }
  throw Error(Errc::InvalidConfig, "unknown PHY family");
}

const Bits& ppdu_bits(const Ppdu& ppdu) {
  return std::visit([](const auto& p) -> const Bits& { return p.bits; }, ppdu);
}

const Psdu& ppdu_psdu(const Ppdu& ppdu) {
  return std::visit([](const auto& p) -> const Psdu& { return p.psdu; }, ppdu);
}

PhyFamily ppdu_family(const Ppdu& ppdu) {
  if (std::holds_alternative<NbPpdu>(ppdu)) return PhyFamily::Narrowband;
  if (std::holds_alternative<UwbPpdu>(ppdu)) return PhyFamily::Uwb;
  return PhyFamily::Hbc;
}

std::size_t psdu_bit_count(const PhyConfig& cfg, std::size_t body_bytes) {
  return coded_size((kMacHeaderBytes + body_bytes + kFcsBytes) * 8, cfg.payload_code(), cfg.spreading);
}

std::vector<FieldSpan> field_layout(const PhyConfig& cfg, std::size_t body_bytes, const FrameFormat& fmt) {
  std::vector<FieldSpan> spans;
  std::size_t pos = 0;
  auto add = [&](std::string name, std::size_t len) {
    spans.push_back({std::move(name), pos, len});
    pos += len;
  };
  switch (cfg.family()) {
    case PhyFamily::Narrowband:
      add("preamble", fmt.nb_preamble.size());
      add("plcp-header", coded_size(kNbHeaderInfoBits, cfg.header_fec, cfg.header_spreading));
      break;
    case PhyFamily::Uwb:
      for (int i = 0; i < fmt.uwb_preamble_repetitions; ++i) add("preamble#" + std::to_string(i + 1), kKasamiLength);
      add("sfd", fmt.uwb_sfd_signs.size() * kKasamiLength);
      add("phr", coded_size(kPhrInfoBits, cfg.header_fec, cfg.header_spreading));
      break;
    case PhyFamily::Hbc:
      for (int i = 0; i < kHbcPreambleRepetitions; ++i) add("preamble#" + std::to_string(i + 1), fmt.hbc_preamble.size());
      add("sfd", fmt.hbc_sfd.size());
      add("phy-header", coded_size(kPhrInfoBits, cfg.header_fec, cfg.header_spreading));
      break;
  }
  add("psdu", psdu_bit_count(cfg, body_bytes));
  return spans;
}

namespace {

Airtime airtime(const PhyConfig& cfg, std::size_t body_bytes, const FrameFormat& fmt, bool whole_codewords) {
  auto info = [&](std::size_t bits, CodeRate code) {
    return whole_codewords ? codeword_count(bits, code) * static_cast<std::size_t>(code.k) : bits;
  };
  const auto header_bits = info(header_info_bits(cfg), cfg.header_fec);
  const auto psdu_bits = info((kMacHeaderBytes + body_bytes + kFcsBytes) * 8, cfg.payload_code());
  // bits / Kbps = ms
  Airtime t;
  t.preamble = Duration(1000.0 * static_cast<double>(preamble_symbols(cfg, fmt)) / cfg.symbol_rate_ksps);
  t.header = Duration(1000.0 * static_cast<double>(header_bits) / info_data_rate(cfg, Component::Header));
  t.psdu = Duration(1000.0 * static_cast<double>(psdu_bits) / info_data_rate(cfg, Component::Psdu));
  return t;
}

}  // namespace

Airtime frame_airtime(const PhyConfig& cfg, std::size_t body_bytes, const FrameFormat& fmt) {
  return airtime(cfg, body_bytes, fmt, false);
}

Airtime ppdu_airtime(const Ppdu& ppdu, const PhyConfig& cfg, const FrameFormat& fmt) {
  if (ppdu_family(ppdu) != cfg.family()) throw Error(Errc::PhyMismatch, "frame was not built for " + cfg.name);
  return airtime(cfg, ppdu_psdu(ppdu).body.size(), fmt, true);
}

std::string hexdump(const Ppdu& ppdu, const PhyConfig& cfg, const FrameFormat& fmt) {
  const auto& bits = ppdu_bits(ppdu);
  const auto bytes = pack_bits(bits);
  const auto spans = field_layout(cfg, ppdu_psdu(ppdu).body.size(), fmt);
  std::string out;
  for (std::size_t off = 0; off < bytes.size(); off += 16) {
    const auto end = std::min(bytes.size(), off + 16);
    out += to_hex(off, 6) + ":";
    for (std::size_t i = off; i < end; ++i) out += " " + to_hex(bytes[i], 2);
    out.append((off + 16 - end) * 3, ' ');
    out += "  |";
    const auto lo = off * 8;
    const auto hi = std::min(end * 8, bits.size());
    for (const auto& s : spans) {
      if (s.bit_offset < hi && s.bit_offset + s.bit_length > lo) out += " " + s.name;
    }
    out += '\n';
  }
  return out;
}

Bytes parse_hex(std::string_view text) {
  Bytes out;
  for (auto line : split(text, '\n')) {
    if (const auto bar = line.find('|'); bar != std::string_view::npos) line = line.substr(0, bar);
    if (const auto colon = line.find(':'); colon != std::string_view::npos) line = line.substr(colon + 1);
    int nibble = -1;
    for (char ch : line) {
      if (std::isspace(static_cast<unsigned char>(ch))) continue;
      int v = -1;
      if (ch >= '0' && ch <= '9') v = ch - '0';
      if (ch >= 'a' && ch <= 'f') v = ch - 'a' + 10;
      if (ch >= 'A' && ch <= 'F') v = ch - 'A' + 10;
      if (v < 0) throw Error(Errc::InvalidField, std::string("not a hex digit: '") + ch + "'");
      if (nibble < 0) {
        nibble = v;
      } else {
        out.push_back(static_cast<std::uint8_t>((nibble << 4) | v));
        nibble = -1;
      }
    }
    if (nibble >= 0) throw Error(Errc::InvalidField, "odd number of hex digits on a line");
  }
  return out;
}

}  // namespace bansim
