#include "cpv/rng.hpp"
#include "cpv/stats.hpp"

#include <doctest.h>

#include <cmath>

using namespace cpv;

namespace {

// Independent bisection on the extended-precision tail; the acceptance
// suite reuses this pattern at full scale.
double oracle_lower_bound(std::uint64_t k, std::uint64_t n, double c) {
  if (k == 0) return 0.0;
  double lo = 0.0, hi = 1.0;
  for (int i = 0; i < 80; ++i) {
    double mid = 0.5 * (lo + hi);
    (exact_tail_oracle(k, n, mid) < 1.0 - c ? lo : hi) = mid;
  }
  return lo;
}

std::uint64_t draw_binomial(CounterRng& rng, std::uint64_t n, double q) {
  std::uint64_t k = 0;
  for (std::uint64_t i = 0; i < n; ++i) {
    if (rng.next_unit() < q) ++k;
  }
  return k;
}

}  // namespace

TEST_CASE("exact tail oracle basics") {
  CHECK(exact_tail_oracle(0, 10, 0.3) == 1.0);
  CHECK(exact_tail_oracle(1, 2, 0.5) == doctest::Approx(0.75).epsilon(1e-12));
  CHECK(exact_tail_oracle(2, 2, 0.5) == doctest::Approx(0.25).epsilon(1e-12));
  CHECK_THROWS(exact_tail_oracle(3, 2, 0.5));
}

TEST_CASE("clopper-pearson lower bound: pinned values") {
  CHECK(clopper_pearson_lower(0, 10, 0.95) == 0.0);
  // k = n closed form (1-c)^(1/n).
  CHECK(clopper_pearson_lower(10, 10, 0.95) ==
        doctest::Approx(std::pow(0.05, 0.1)).epsilon(1e-4));
  CHECK_THROWS(clopper_pearson_lower(5, 4, 0.9));
  CHECK_THROWS(clopper_pearson_lower(1, 0, 0.9));
  CHECK_THROWS(clopper_pearson_lower(1, 2, 1.0));
  CHECK_THROWS(clopper_pearson_lower(1, 2, 0.0));
}

TEST_CASE("clopper-pearson matches the oracle bisection on a quick grid") {
  for (std::uint64_t n : {1ull, 2ull, 7ull, 25ull, 60ull, 150ull}) {
    for (std::uint64_t k = 0; k <= n; ++k) {
      for (double c : {0.9, 0.99, 0.999}) {
        double prod = clopper_pearson_lower(k, n, c);
        double ref = oracle_lower_bound(k, n, c);
        CAPTURE(n);
        CAPTURE(k);
        CAPTURE(c);
        CHECK(std::abs(prod - ref) < 1e-6);
      }
    }
  }
}

TEST_CASE("bound is sound: tail at the bound stays below 1-c") {
  for (std::uint64_t n : {5ull, 40ull, 333ull}) {
    for (std::uint64_t k = 1; k <= n; k += std::max<std::uint64_t>(1, n / 7)) {
      for (double c : {0.9, 0.999}) {
        double p = clopper_pearson_lower(k, n, c);
        CHECK(exact_tail_oracle(k, n, p) <= 1.0 - c + 1e-12);
      }
    }
  }
}

TEST_CASE("monotonicity in k, c, and n") {
  double prev = -1.0;
  for (std::uint64_t k = 0; k <= 50; ++k) {
    double b = clopper_pearson_lower(k, 50, 0.95);
    CHECK(b >= prev);
    prev = b;
  }
  CHECK(clopper_pearson_lower(40, 50, 0.999) <= clopper_pearson_lower(40, 50, 0.99));
  CHECK(clopper_pearson_lower(40, 50, 0.99) <= clopper_pearson_lower(40, 50, 0.9));
  // For a fixed ratio the bound approaches the ratio from below as n grows.
  double b100 = clopper_pearson_lower(80, 100, 0.95);
  double b1000 = clopper_pearson_lower(800, 1000, 0.95);
  double b10000 = clopper_pearson_lower(8000, 10000, 0.95);
  CHECK(b100 < b1000);
  CHECK(b1000 < b10000);
  CHECK(b10000 < 0.8);
}

TEST_CASE("simulated coverage meets the confidence (quick grid)") {
  const double c = 0.95;
  for (double q : {0.5, 0.9, 0.99}) {
    for (std::uint64_t n : {50ull, 500ull}) {
      int covered = 0;
      const int reps = 600;
      for (int rep = 0; rep < reps; ++rep) {
        CounterRng rng(1000 + static_cast<std::uint64_t>(q * 100), rep * 2 + n);
        std::uint64_t k = draw_binomial(rng, n, q);
        if (clopper_pearson_lower(k, n, c) <= q) ++covered;
      }
      CAPTURE(q);
      CAPTURE(n);
      CHECK(static_cast<double>(covered) / reps >= c - 0.02);
    }
  }
}

TEST_CASE("testing outcome bookkeeping") {
  TestingOutcome t;
  t.n_sampled = 4153;
  t.n_rejected = 559;
  t.n_verified = 3374;
  t.n_a_violated = 0;
  t.n_g_violated = 220;
  CHECK(t.n_sampled == t.n_rejected + t.n_verified + t.n_a_violated + t.n_g_violated);
  CHECK(t.n_effective() == 3594);
  CHECK(t.k() == 3374);
  CHECK(t.mean_correctness() == doctest::Approx(0.9388).epsilon(1e-3));
}
