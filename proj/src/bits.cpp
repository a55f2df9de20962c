#include "bansim/bits.hpp"

#include "bansim/error.hpp"

namespace bansim {

void append_uint(Bits& out, std::uint64_t value, int width) {
  for (int i = width - 1; i >= 0; --i) out.push_back(static_cast<std::uint8_t>((value >> i) & 1U));
}

void append_bytes(Bits& out, std::span<const std::uint8_t> bytes) {
  for (auto b : bytes) append_uint(out, b, 8);
}

std::uint64_t read_uint(std::span<const std::uint8_t> bits, std::size_t offset, int width) {
  if (offset + static_cast<std::size_t>(width) > bits.size()) {
    throw Error(Errc::TruncatedFrame, "read past end of bit image");
  }
  std::uint64_t value = 0;
  for (int i = 0; i < width; ++i) value = (value << 1) | (bits[offset + static_cast<std::size_t>(i)] & 1U);
  return value;
}

Bytes bits_to_bytes(std::span<const std::uint8_t> bits) {
  if (bits.size() % 8 != 0) throw Error(Errc::InvalidField, "bit count is not a whole number of bytes");
  return pack_bits(bits);
}

Bytes pack_bits(std::span<const std::uint8_t> bits) {
  Bytes out((bits.size() + 7) / 8, 0);
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if (bits[i] & 1U) out[i / 8] |= static_cast<std::uint8_t>(0x80U >> (i % 8));
  }
  return out;
}

Bits unpack_bytes(std::span<const std::uint8_t> bytes) {
  Bits out;
  out.reserve(bytes.size() * 8);
  append_bytes(out, bytes);
  return out;
}

std::uint32_t crc_bits(std::span<const std::uint8_t> bits, int width, std::uint32_t poly,
                       std::uint32_t init) {
  const std::uint32_t top = 1U << (width - 1);
  const std::uint32_t mask = width == 32 ? 0xFFFFFFFFU : (1U << width) - 1U;
  std::uint32_t reg = init & mask;
  for (auto bit : bits) {
    const bool feedback = ((reg & top) != 0) != ((bit & 1U) != 0);
    reg = (reg << 1) & mask;
    if (feedback) reg ^= poly;
  }
  return reg & mask;
}

std::uint16_t crc16(std::span<const std::uint8_t> bytes, Crc16Params params) {
  std::uint32_t reg = params.init;
  for (auto byte : bytes) {
    reg ^= static_cast<std::uint32_t>(byte) << 8;
    for (int i = 0; i < 8; ++i) {
      reg = (reg & 0x8000U) ? ((reg << 1) ^ params.poly) : (reg << 1);
      reg &= 0xFFFFU;
    }
  }
  return static_cast<std::uint16_t>(reg);
}

std::uint8_t crc4(std::span<const std::uint8_t> bits) {
  return static_cast<std::uint8_t>(crc_bits(bits, 4, 0x3, 0xF));
}

std::uint8_t crc8(std::span<const std::uint8_t> bits) {
  return static_cast<std::uint8_t>(crc_bits(bits, 8, 0x07, 0x00));
}

}  // namespace bansim
