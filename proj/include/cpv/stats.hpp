#pragma once

#include <cstdint>
#include <string>

namespace cpv {

// Probability lower bound p at confidence c: the currency every piece of
// evidence is expressed in.
struct ProbBound {
  double p = 0.0;
  double c = 0.0;
};

// Per-campaign sample bookkeeping, mirroring the assurance-case counter line
// "N Verified,  N Rejected,  N A-Violated,  N G-Violated". For the
// testing-based weak merge, statically passed scenes are folded into
// n_verified and recorded separately in n_static_pass.
struct TestingOutcome {
  std::uint64_t n_sampled = 0;
  std::uint64_t n_rejected = 0;
  std::uint64_t n_verified = 0;
  std::uint64_t n_a_violated = 0;
  std::uint64_t n_g_violated = 0;
  std::uint64_t n_static_pass = 0;
  std::uint64_t n_diagnostic = 0;  // aborted traces; excluded from all counts
  double wall_seconds = 0.0;

  std::uint64_t n_effective() const { return n_sampled - n_rejected; }
  std::uint64_t k() const { return n_verified + n_a_violated; }
  double mean_correctness() const {
    return n_effective() == 0 ? 0.0
                              : static_cast<double>(k()) / static_cast<double>(n_effective());
  }
};

// One-sided Clopper-Pearson lower bound: 0 when k = 0, otherwise the root of
// P[Bin(n, p) >= k] = 1 - c, found by bisection on the exact tail and
// rounded downward so floating error never weakens the bound.
// Throws std::domain_error unless 0 <= k <= n, n >= 1, 0 < c < 1.
double clopper_pearson_lower(std::uint64_t k, std::uint64_t n, double c);

// P[Bin(n, p) >= k] by direct per-term summation in extended precision.
// Independent of the production tail above; kept for test oracles.
double exact_tail_oracle(std::uint64_t k, std::uint64_t n, double p);

}  // namespace cpv
