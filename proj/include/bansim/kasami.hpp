#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "bansim/bits.hpp"

namespace bansim {

inline constexpr int kKasamiLength = 63;
inline constexpr int kKasamiSetSize = 8;

using Chips63 = std::array<std::int8_t, kKasamiLength>;

/// Degree-6 maximal-length sequence from x^6 + x + 1, register seeded 000001.
std::array<std::uint8_t, kKasamiLength> msequence63();

/// Member `index` (0..7) of the small Kasami set of length 63, as +/-1 chips.
///
/// Index 0 is the m-sequence u itself; index k > 0 is u xor T^(k-1) w, where
/// w is u decimated by 2^3 + 1 = 9 (period 7), from the first phase that
/// is not all zero. Bit 0 maps to +1.
Chips63 kasami63(int index);

std::vector<Chips63> kasami63_set();

/// Periodic correlation sum_i a[i] * b[(i + shift) mod 63].
int periodic_correlation(const Chips63& a, const Chips63& b, int shift);

/// Chips as transmitted bits: +1 -> 1, -1 -> 0.
Bits chips_to_bits(const Chips63& chips);

}  // namespace bansim
