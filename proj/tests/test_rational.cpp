#include "cpv/rational.hpp"
#include "cpv/rng.hpp"

#include <doctest.h>

using namespace cpv;

TEST_CASE("decimal strings parse as exact decimal fractions") {
  CHECK(*rat_from_string("5.4") == Rat(27, 5));
  CHECK(*rat_from_string("0.1") == Rat(1, 10));
  CHECK(*rat_from_string("-0.9") == Rat(-9, 10));
  CHECK(*rat_from_string("5") == Rat(5));
  CHECK(*rat_from_string("3/7") == Rat(3, 7));
  CHECK(!rat_from_string(""));
  CHECK(!rat_from_string("1."));
  CHECK(!rat_from_string("1/0"));
  CHECK(!rat_from_string("abc"));
}

TEST_CASE("canonical rendering round-trips") {
  CHECK(rat_to_string(Rat(27, 5)) == "5.4");
  CHECK(rat_to_string(Rat(1, 10)) == "0.1");
  CHECK(rat_to_string(Rat(-9, 10)) == "-0.9");
  CHECK(rat_to_string(Rat(5)) == "5");
  CHECK(rat_to_string(Rat(1, 3)) == "1/3");
  CHECK(rat_to_string(Rat(1, 8)) == "0.125");

  CounterRng rng(11, 0);
  for (int i = 0; i < 2000; ++i) {
    long num = static_cast<long>(rng.next_below(100000)) - 50000;
    long den = 1 + static_cast<long>(rng.next_below(1000));
    Rat r(num, den);
    CHECK(*rat_from_string(rat_to_string(r)) == r);
  }
}

TEST_CASE("doubles convert exactly") {
  CHECK(rat_from_double(0.5) == Rat(1, 2));
  CHECK(rat_from_double(0.1) != Rat(1, 10));  // binary 0.1 is not 1/10
  CHECK(rat_to_double(rat_from_double(0.1)) == 0.1);
  CHECK_THROWS(rat_from_double(1.0 / 0.0));
}

TEST_CASE("floor, ceil, abs, median") {
  CHECK(rat_floor(Rat(7, 2)) == Rat(3));
  CHECK(rat_floor(Rat(-7, 2)) == Rat(-4));
  CHECK(rat_floor(Rat(4)) == Rat(4));
  CHECK(rat_ceil(Rat(7, 2)) == Rat(4));
  CHECK(rat_ceil(Rat(-7, 2)) == Rat(-3));
  CHECK(rat_abs(Rat(-3, 2)) == Rat(3, 2));
  CHECK(rat_median3(Rat(1), Rat(2), Rat(9)) == Rat(2));
  CHECK(rat_median3(Rat(5), Rat(5), Rat(5)) == Rat(5));
  CHECK(rat_median3(Rat(1), Rat(9), Rat(5)) == Rat(5));
  CHECK(rat_clamp(Rat(7), Rat(0), Rat(5)) == Rat(5));
}

TEST_CASE("counter rng: same key reproduces, different stream diverges") {
  CounterRng a(42, 7);
  std::uint64_t first = a.next_u64();
  CounterRng b(42, 7);
  CHECK(b.next_u64() == first);
  CounterRng c(42, 8);
  CHECK(c.next_u64() != first);

  CounterRng d(1, 2);
  for (int i = 0; i < 100; ++i) {
    Rat v = d.uniform_rat(Rat(6, 5), Rat(16, 5), 20000);
    CHECK(v >= Rat(6, 5));
    CHECK(v <= Rat(16, 5));
  }
}
