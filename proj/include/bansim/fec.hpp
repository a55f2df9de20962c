#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>

#include "bansim/bits.hpp"
#include "bansim/phy.hpp"

namespace bansim {

/// Produces the n-k parity bits of one systematic codeword.
///
/// Framing and timing only depend on the code rate; a real BCH encoder can be
/// dropped in here without touching the codecs.
class ParityGenerator {
 public:
  virtual ~ParityGenerator() = default;
  virtual void parity(std::span<const std::uint8_t> info, std::span<std::uint8_t> out) const = 0;
};

/// Deterministic stand-in: parity bit j is the XOR of the information bits at
/// positions congruent to j modulo n-k, so every single-bit error is visible.
class PlaceholderParity final : public ParityGenerator {
 public:
  void parity(std::span<const std::uint8_t> info, std::span<std::uint8_t> out) const override;
};

std::shared_ptr<const ParityGenerator> default_parity();

/// Whole codewords needed for `info_bits`; the last block is zero-padded.
std::size_t codeword_count(std::size_t info_bits, CodeRate code);

Bits fec_encode(std::span<const std::uint8_t> info, CodeRate code, const ParityGenerator& gen);

struct FecDecoded {
  Bits info;            // first `info_bits` information bits
  bool parity_ok = true;
  bool padding_ok = true;  // pad bits of the final block were zero
};

/// Strips parity after checking it; `coded.size()` must be whole codewords.
FecDecoded fec_decode(std::span<const std::uint8_t> coded, std::size_t info_bits, CodeRate code,
                      const ParityGenerator& gen);

/// Repeats every bit `factor` times.
Bits spread(std::span<const std::uint8_t> bits, int factor);

struct Despread {
  Bits bits;
  bool consistent = true;  // every repetition agreed with the first copy
};

Despread despread(std::span<const std::uint8_t> bits, int factor);

}  // namespace bansim
