#include <doctest.h>

#include <set>

#include "bansim/kasami.hpp"

using namespace bansim;

TEST_CASE("m-sequence is balanced and maximal") {
  const auto u = msequence63();
  int ones = 0;
  for (auto b : u) ones += b;
  CHECK(ones == 32);
  // Every non-zero 6-bit window appears exactly once over one period.
  std::set<int> windows;
  for (int i = 0; i < kKasamiLength; ++i) {
    int w = 0;
    for (int j = 0; j < 6; ++j) w = (w << 1) | u[static_cast<std::size_t>((i + j) % kKasamiLength)];
    windows.insert(w);
  }
  CHECK(windows.size() == 63);
  CHECK(windows.count(0) == 0);
}

TEST_CASE("small set: eight distinct members, three-valued correlation") {
  const auto set = kasami63_set();
  REQUIRE(set.size() == kKasamiSetSize);
  const std::set<int> allowed{-1, -9, 7};
  for (std::size_t a = 0; a < set.size(); ++a) {
    CHECK(periodic_correlation(set[a], set[a], 0) == 63);
    for (std::size_t b = 0; b < set.size(); ++b) {
      for (int s = 0; s < kKasamiLength; ++s) {
        if (a == b && s == 0) continue;
        const int c = periodic_correlation(set[a], set[b], s);
        CAPTURE(a);
        CAPTURE(b);
        CAPTURE(s);
        CHECK(allowed.count(c) == 1);
      }
    }
  }
}

TEST_CASE("chip mapping") {
  const auto c = kasami63(0);
  const auto bits = chips_to_bits(c);
  REQUIRE(bits.size() == 63);
  for (std::size_t i = 0; i < 63; ++i) CHECK((bits[i] == 1) == (c[i] == 1));
}
