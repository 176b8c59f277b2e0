#include <random>

#include "doctest.h"

#include "maestro/bitvec.hpp"

using maestro::BitVecValue;

TEST_SUITE("bitvec") {

TEST_CASE("construction masks to the width") {
  CHECK(BitVecValue(5, 0x3f).bits() == 0x1f);
  CHECK(BitVecValue(64, ~0ULL).bits() == ~0ULL);
  CHECK(BitVecValue(1, 2).bits() == 0);
  CHECK_THROWS_AS(BitVecValue(0, 0), std::invalid_argument);
  CHECK_THROWS_AS(BitVecValue(65, 0), std::invalid_argument);
}

TEST_CASE("width_for is the bit length, at least 1") {
  CHECK(BitVecValue::width_for(0) == 1);
  CHECK(BitVecValue::width_for(1) == 1);
  CHECK(BitVecValue::width_for(2) == 2);
  CHECK(BitVecValue::width_for(31) == 5);
  CHECK(BitVecValue::width_for(32) == 6);
  CHECK(BitVecValue::width_for(~0ULL) == 64);
}

TEST_CASE("counter wraps at 2^5") {
  BitVecValue v(5, 0);
  for (int i = 0; i < 32; ++i) v = (v + BitVecValue(1, 1)).resized(5);
  CHECK(v.bits() == 0);
  CHECK((BitVecValue(5, 0) - BitVecValue(1, 1)).bits() == 31);
}

TEST_CASE("mixed widths zero-extend to the wider operand") {
  const BitVecValue r = BitVecValue(3, 7) + BitVecValue(6, 1);
  CHECK(r.width() == 6);
  CHECK(r.bits() == 8);
  CHECK(maestro::compare_unsigned(BitVecValue(2, 3), BitVecValue(8, 3)) == 0);
  CHECK(maestro::compare_unsigned(BitVecValue(2, 3), BitVecValue(8, 200)) < 0);
}

TEST_CASE("exhaustive: + and - match arithmetic modulo 2^w for widths 1..8") {
  for (unsigned wa = 1; wa <= 8; ++wa) {
    for (unsigned wb = 1; wb <= 8; ++wb) {
      const unsigned w = std::max(wa, wb);
      const std::uint64_t m = (1ULL << w);
      for (std::uint64_t a = 0; a < (1ULL << wa); ++a) {
        for (std::uint64_t b = 0; b < (1ULL << wb); ++b) {
          const BitVecValue x(wa, a);
          const BitVecValue y(wb, b);
          const BitVecValue s = x + y;
          const BitVecValue d = x - y;
          REQUIRE(s.width() == w);
          REQUIRE(s.bits() == (a + b) % m);
          REQUIRE(d.bits() == (a + m - b) % m);
        }
      }
    }
  }
}

TEST_CASE("fuzz: results stay below 2^width for widths 1..16") {
  std::mt19937_64 rng(0x5eed);
  std::uniform_int_distribution<unsigned> width(1, 16);
  for (int i = 0; i < 200000; ++i) {
    const unsigned wa = width(rng);
    const unsigned wb = width(rng);
    const BitVecValue a(wa, rng());
    const BitVecValue b(wb, rng());
    for (const BitVecValue& r : {a + b, a - b, a.resized(wb), b.resized(wa)}) {
      REQUIRE(r.bits() < (1ULL << r.width()));
    }
    REQUIRE(a.bits() < (1ULL << wa));
  }
}

}
