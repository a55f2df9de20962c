#include "bansim/kasami.hpp"

#include "bansim/error.hpp"

namespace bansim {

std::array<std::uint8_t, kKasamiLength> msequence63() {
  // a[n+6] = a[n+1] xor a[n]
  std::array<std::uint8_t, kKasamiLength> seq{};
  std::array<std::uint8_t, 6> reg{0, 0, 0, 0, 0, 1};
  for (int i = 0; i < kKasamiLength; ++i) {
    seq[static_cast<std::size_t>(i)] = reg[0];
    const std::uint8_t next = reg[0] ^ reg[1];
    for (int j = 0; j < 5; ++j) reg[static_cast<std::size_t>(j)] = reg[static_cast<std::size_t>(j) + 1];
    reg[5] = next;
  }
  return seq;
}

Chips63 kasami63(int index) {
  if (index < 0 || index >= kKasamiSetSize) throw Error(Errc::OutOfRange, "Kasami index must be 0..7");
  const auto u = msequence63();
  // Some decimation phases of u are all zero; take the first that is not.
  int phase = 0;
  for (;; ++phase) {
    bool any = false;
    for (int i = 0; i < 7; ++i) any = any || u[static_cast<std::size_t>((9 * i + phase) % kKasamiLength)] != 0;
    if (any) break;
  }
  Chips63 chips{};
  for (int i = 0; i < kKasamiLength; ++i) {
    std::uint8_t bit = u[static_cast<std::size_t>(i)];
    if (index > 0) {
      const int shift = index - 1;
      bit ^= u[static_cast<std::size_t>((9 * (i + shift) + phase) % kKasamiLength)];
    }
    chips[static_cast<std::size_t>(i)] = bit ? -1 : 1;
  }
  return chips;
}

std::vector<Chips63> kasami63_set() {
  std::vector<Chips63> set;
  for (int i = 0; i < kKasamiSetSize; ++i) set.push_back(kasami63(i));
  return set;
}

int periodic_correlation(const Chips63& a, const Chips63& b, int shift) {
  int sum = 0;
  for (int i = 0; i < kKasamiLength; ++i) {
    sum += a[static_cast<std::size_t>(i)] * b[static_cast<std::size_t>(((i + shift) % kKasamiLength + kKasamiLength) % kKasamiLength)];
  }
  return sum;
}

Bits chips_to_bits(const Chips63& chips) {
  Bits bits;
  bits.reserve(chips.size());
  for (auto c : chips) bits.push_back(c > 0 ? 1 : 0);
  return bits;
}

}  // namespace bansim
