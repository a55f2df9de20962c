#include "bansim/fec.hpp"

#include <algorithm>

#include "bansim/error.hpp"

namespace bansim {

void PlaceholderParity::parity(std::span<const std::uint8_t> info, std::span<std::uint8_t> out) const {
  std::fill(out.begin(), out.end(), std::uint8_t{0});
  if (out.empty()) return;
  for (std::size_t i = 0; i < info.size(); ++i) out[i % out.size()] ^= info[i] & 1U;
}

std::shared_ptr<const ParityGenerator> default_parity() {
  static const auto instance = std::make_shared<const PlaceholderParity>();
  return instance;
}

std::size_t codeword_count(std::size_t info_bits, CodeRate code) {
  const auto k = static_cast<std::size_t>(code.k);
  return (info_bits + k - 1) / k;
}

Bits fec_encode(std::span<const std::uint8_t> info, CodeRate code, const ParityGenerator& gen) {
  if (code.k <= 0 || code.n < code.k) throw Error(Errc::InvalidConfig, "bad code rate");
  const auto k = static_cast<std::size_t>(code.k);
  const auto n = static_cast<std::size_t>(code.n);
  const auto blocks = codeword_count(info.size(), code);
  Bits out;
  out.reserve(blocks * n);
  Bits block(k);
  Bits par(n - k);
  for (std::size_t b = 0; b < blocks; ++b) {
    std::fill(block.begin(), block.end(), std::uint8_t{0});
    const auto start = b * k;
    const auto take = std::min(k, info.size() - start);
    std::copy_n(info.begin() + static_cast<std::ptrdiff_t>(start), take, block.begin());
    gen.parity(block, par);
    out.insert(out.end(), block.begin(), block.end());
    out.insert(out.end(), par.begin(), par.end());
  }
  return out;
}

FecDecoded fec_decode(std::span<const std::uint8_t> coded, std::size_t info_bits, CodeRate code,
                      const ParityGenerator& gen) {
  const auto k = static_cast<std::size_t>(code.k);
  const auto n = static_cast<std::size_t>(code.n);
  if (coded.size() % n != 0) throw Error(Errc::TruncatedFrame, "partial codeword");
  FecDecoded result;
  result.info.reserve(coded.size() / n * k);
  Bits par(n - k);
  for (std::size_t off = 0; off < coded.size(); off += n) {
    const auto block = coded.subspan(off, k);
    gen.parity(block, par);
    if (!std::equal(par.begin(), par.end(), coded.begin() + static_cast<std::ptrdiff_t>(off + k))) {
      result.parity_ok = false;
    }
    result.info.insert(result.info.end(), block.begin(), block.end());
  }
  if (result.info.size() < info_bits) throw Error(Errc::TruncatedFrame, "too few codewords");
  result.padding_ok = std::all_of(result.info.begin() + static_cast<std::ptrdiff_t>(info_bits),
                                  result.info.end(), [](std::uint8_t b) { return b == 0; });
  result.info.resize(info_bits);
  return result;
}

Bits spread(std::span<const std::uint8_t> bits, int factor) {
  Bits out;
  out.reserve(bits.size() * static_cast<std::size_t>(factor));
  for (auto b : bits) out.insert(out.end(), static_cast<std::size_t>(factor), b);
  return out;
}

Despread despread(std::span<const std::uint8_t> bits, int factor) {
  const auto f = static_cast<std::size_t>(factor);
  if (bits.size() % f != 0) throw Error(Errc::TruncatedFrame, "partial spreading group");
  Despread result;
  result.bits.reserve(bits.size() / f);
  for (std::size_t i = 0; i < bits.size(); i += f) {
    result.bits.push_back(bits[i]);
    for (std::size_t j = 1; j < f; ++j) {
      if (bits[i + j] != bits[i]) result.consistent = false;
    }
  }
  return result;
}

}  // namespace bansim
