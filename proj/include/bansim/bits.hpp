#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace bansim {

/// Unpacked bit image, one 0/1 value per element, transmission order.
using Bits = std::vector<std::uint8_t>;
using Bytes = std::vector<std::uint8_t>;

/// Appends `width` bits of `value`, most significant first.
void append_uint(Bits& out, std::uint64_t value, int width);
/// Appends bytes, most significant bit of each byte first.
void append_bytes(Bits& out, std::span<const std::uint8_t> bytes);

std::uint64_t read_uint(std::span<const std::uint8_t> bits, std::size_t offset, int width);
/// `bits.size()` must be a multiple of 8.
Bytes bits_to_bytes(std::span<const std::uint8_t> bits);
/// Packs into bytes, zero-padding the final partial byte.
Bytes pack_bits(std::span<const std::uint8_t> bits);
Bits unpack_bytes(std::span<const std::uint8_t> bytes);

/// Bitwise MSB-first CRC over an unpacked bit sequence; no reflection, no
/// final xor.
std::uint32_t crc_bits(std::span<const std::uint8_t> bits, int width, std::uint32_t poly,
                       std::uint32_t init);

struct Crc16Params {
  std::uint16_t poly = 0x1021;
  std::uint16_t init = 0xFFFF;
};

/// Frame check sequence; CRC-16/CCITT-FALSE by default.
std::uint16_t crc16(std::span<const std::uint8_t> bytes, Crc16Params params = {});

/// Header check for the PLCP header: CRC-4, x^4 + x + 1, init 0xF.
std::uint8_t crc4(std::span<const std::uint8_t> bits);
/// Header check for UWB and HBC headers: CRC-8, x^8 + x^2 + x + 1, init 0.
std::uint8_t crc8(std::span<const std::uint8_t> bits);

}  // namespace bansim
