#include "cpv/stats.hpp"

#include <cmath>
#include <mutex>
#include <stdexcept>
#include <vector>

namespace cpv {

namespace {

// P[Bin(n, p) >= k] for k >= 1. Sums whichever tail is shorter, starting
// from a log-space anchor term and extending by the pmf ratio recurrence.
double binomial_upper_tail(std::uint64_t k, std::uint64_t n, double p) {
  if (p <= 0.0) return 0.0;
  if (p >= 1.0) return 1.0;
  const double q = 1.0 - p;
  auto log_pmf = [&](std::uint64_t i) {
    return std::lgamma(static_cast<double>(n) + 1.0) -
           std::lgamma(static_cast<double>(i) + 1.0) -
           std::lgamma(static_cast<double>(n - i) + 1.0) +
           static_cast<double>(i) * std::log(p) + static_cast<double>(n - i) * std::log(q);
  };
  const double ratio = p / q;
  if (static_cast<double>(k) >= p * static_cast<double>(n)) {
    // Upper tail is the short one: sum i = k..n upward.
    double term = std::exp(log_pmf(k));
    double sum = term;
    for (std::uint64_t i = k; i < n; ++i) {
      term *= ratio * static_cast<double>(n - i) / static_cast<double>(i + 1);
      sum += term;
      if (term < sum * 1e-18) break;
    }
    return sum < 1.0 ? sum : 1.0;
  }
  // Otherwise sum the complement i = 0..k-1 downward from k-1.
  double term = std::exp(log_pmf(k - 1));
  double sum = term;
  for (std::uint64_t i = k - 1; i > 0; --i) {
    term *= static_cast<double>(i) / (ratio * static_cast<double>(n - i + 1));
    sum += term;
    if (term < sum * 1e-18) break;
  }
  double tail = 1.0 - sum;
  return tail > 0.0 ? tail : 0.0;
}

}  // namespace

double clopper_pearson_lower(std::uint64_t k, std::uint64_t n, double c) {
  if (n < 1) throw std::domain_error("clopper_pearson_lower: n must be >= 1");
  if (k > n) throw std::domain_error("clopper_pearson_lower: k must be <= n");
  if (!(c > 0.0 && c < 1.0)) throw std::domain_error("clopper_pearson_lower: c must be in (0,1)");
  if (k == 0) return 0.0;
  const double target = 1.0 - c;
  double lo = 0.0;
  double hi = 1.0;
  for (int iter = 0; iter < 200; ++iter) {
    double mid = 0.5 * (lo + hi);
    if (binomial_upper_tail(k, n, mid) < target) {
      lo = mid;
    } else {
      hi = mid;
    }
    if (hi - lo <= 1e-15 * hi) break;
  }
  // lo sits on the side where the tail is still below 1-c, so the bound is
  // rounded down as required.
  return lo;
}

double exact_tail_oracle(std::uint64_t k, std::uint64_t n, double p) {
  if (n < 1) throw std::domain_error("exact_tail_oracle: n must be >= 1");
  if (k > n) throw std::domain_error("exact_tail_oracle: k must be <= n");
  if (k == 0) return 1.0;
  if (p <= 0.0) return 0.0;
  if (p >= 1.0) return 1.0;

  // Shared table of ln(i!), grown on demand.
  static std::vector<long double> log_fact{0.0L};
  static std::mutex table_mutex;
  {
    std::lock_guard<std::mutex> lock(table_mutex);
    while (log_fact.size() <= n) {
      log_fact.push_back(log_fact.back() +
                         std::log(static_cast<long double>(log_fact.size())));
    }
  }
  const long double lp = std::log(static_cast<long double>(p));
  const long double lq = std::log(1.0L - static_cast<long double>(p));
  long double sum = 0.0L;
  for (std::uint64_t i = k; i <= n; ++i) {
    long double lt = log_fact[n] - log_fact[i] - log_fact[n - i] +
                     static_cast<long double>(i) * lp + static_cast<long double>(n - i) * lq;
    sum += std::exp(lt);
  }
  if (sum > 1.0L) sum = 1.0L;
  return static_cast<double>(sum);
}

}  // namespace cpv
