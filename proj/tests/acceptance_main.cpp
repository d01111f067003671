// Acceptance suite: every release criterion, one pass/fail line each.
// Exit status is the number of failed criteria.

#include "cpv/aeb.hpp"
#include "cpv/algebra.hpp"
#include "cpv/assurance.hpp"
#include "cpv/campaign.hpp"
#include "cpv/eval.hpp"
#include "cpv/parser.hpp"

#include "generators.hpp"
#include "reference_semantics.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

using namespace cpv;

namespace {

struct Criterion {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& why) {
    if (!ok && pass) {
      pass = false;
      detail = why;
    }
  }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Contract stub_contract(const std::string& name) {
  return Contract::make(name, "S", parse_formula("true"), parse_formula("(x) > (0)"));
}

// ---- 1. union bound arithmetic ----
Criterion criterion_union_bound() {
  Criterion c;
  auto t0 = std::chrono::steady_clock::now();
  EvidencePtr a1 = verify_assumption(stub_contract("p1"), 0.9255, 0.999, "fixed");
  EvidencePtr a2 = verify_assumption(stub_contract("p2"), 0.99, 0.999, "fixed");
  EvidencePtr naive = combine_union(a1, a2, UnionOp::Compose);
  EvidencePtr b1 = verify_assumption(stub_contract("p3"), 0.9559, 0.999, "fixed");
  EvidencePtr b2 = verify_assumption(stub_contract("p4"), 0.99, 0.999, "fixed");
  EvidencePtr optimized = combine_union(b1, b2, UnionOp::Compose);
  double elapsed = seconds_since(t0);
  c.require(std::abs(naive->bound.p - 0.9155) <= 1e-12, "naive bound != 0.9155");
  c.require(std::abs(naive->bound.c - 0.998001) <= 1e-12, "naive confidence != 0.998001");
  c.require(std::abs(optimized->bound.p - 0.9459) <= 1e-12, "optimized bound != 0.9459");
  c.require(std::abs(optimized->bound.c - 0.998001) <= 1e-12,
            "optimized confidence != 0.998001");
  c.require(elapsed < 1e-3, "combination arithmetic exceeded 1 ms");
  if (c.pass) {
    std::ostringstream os;
    os << "0.9255(+)0.99 -> 0.9155, 0.9559(+)0.99 -> 0.9459 at c=0.998001 in "
       << elapsed * 1e6 << " us";
    c.detail = os.str();
  }
  return c;
}

// ---- 2. testing-based weak merge bookkeeping ----
Criterion criterion_kwt_bookkeeping() {
  Criterion c;
  TestingOutcome t;
  t.n_sampled = 6329;
  t.n_rejected = 810;
  t.n_static_pass = 1876;
  t.n_verified = 1876 + 3446;  // static passes fold into the verified count
  t.n_g_violated = 197;
  c.require(t.n_sampled == t.n_rejected + t.n_verified + t.n_a_violated + t.n_g_violated,
            "counter invariant broken");
  c.require(t.k() == 5322, "k != 5322");
  c.require(t.n_effective() == 5519, "n_eff != 5519");
  c.require(std::abs(t.mean_correctness() * 100.0 - 96.43) <= 0.01,
            "mean correctness != 96.43%");
  if (c.pass) {
    std::ostringstream os;
    os << "k=5322, n_eff=5519, mean=" << t.mean_correctness() * 100.0 << "%";
    c.detail = os.str();
  }
  return c;
}

// ---- 3. Clopper-Pearson vs the extended-precision oracle ----
Criterion criterion_clopper_pearson() {
  Criterion c;
  auto t0 = std::chrono::steady_clock::now();
  double worst = 0.0;
  for (std::uint64_t n = 1; n <= 200; ++n) {
    for (std::uint64_t k = 0; k <= n; ++k) {
      for (double conf : {0.9, 0.99, 0.999}) {
        double prod = clopper_pearson_lower(k, n, conf);
        double lo = 0.0, hi = 1.0;
        if (k > 0) {
          for (int it = 0; it < 60; ++it) {
            double mid = 0.5 * (lo + hi);
            (exact_tail_oracle(k, n, mid) < 1.0 - conf ? lo : hi) = mid;
          }
        }
        worst = std::max(worst, std::abs(prod - lo));
      }
    }
  }
  c.require(worst < 1e-6, "production bound deviates from the oracle by " +
                              std::to_string(worst));

  // Simulated coverage on the module grid.
  for (double q : {0.5, 0.9, 0.99}) {
    for (std::uint64_t n : {50ull, 500ull}) {
      int covered = 0;
      const int reps = 2000;
      for (int rep = 0; rep < reps; ++rep) {
        CounterRng rng(60000 + static_cast<std::uint64_t>(q * 1000), rep * 1000 + n);
        std::uint64_t k = 0;
        for (std::uint64_t i = 0; i < n; ++i) {
          if (rng.next_unit() < q) ++k;
        }
        if (clopper_pearson_lower(k, n, 0.95) <= q) ++covered;
      }
      double coverage = static_cast<double>(covered) / reps;
      std::ostringstream why;
      why << "coverage " << coverage << " below 0.94 at q=" << q << ", n=" << n;
      c.require(coverage >= 0.95 - 0.01, why.str());
    }
  }

  double elapsed = seconds_since(t0);
  c.require(elapsed < 60.0, "criterion exceeded 60 s");
  if (c.pass) {
    std::ostringstream os;
    os << "max |production - oracle| = " << worst << ", coverage grid ok, "
       << elapsed << " s";
    c.detail = os.str();
  }
  return c;
}

// ---- 4. evaluator vs reference semantics ----
Criterion criterion_evaluator_oracle() {
  Criterion c;
  auto t0 = std::chrono::steady_clock::now();
  std::uint64_t mismatches = 0;
  const std::uint64_t cases = 10000;
  for (std::uint64_t seed = 0; seed < cases; ++seed) {
    CounterRng rng(140000, seed);
    FormulaPtr f = testgen::random_formula(rng, 5);
    Trace tau = testgen::random_trace(rng, 8);
    for (std::size_t t = 0; t < tau.length(); ++t) {
      if (eval_formula(*f, tau, t) != testref::ref_eval(*f, tau, t)) ++mismatches;
    }
  }
  double elapsed = seconds_since(t0);
  c.require(mismatches == 0, std::to_string(mismatches) + " mismatches");
  c.require(elapsed < 30.0, "criterion exceeded 30 s");
  if (c.pass) {
    std::ostringstream os;
    os << cases << " random formula/trace pairs, all positions agree, " << elapsed << " s";
    c.detail = os.str();
  }
  return c;
}

// ---- 5. operator semantics oracle + toy-distribution probability checks ----
Criterion criterion_operator_oracle() {
  Criterion c;
  auto t0 = std::chrono::steady_clock::now();

  std::uint64_t mismatches = 0;
  const std::uint64_t cases = 10000;
  for (std::uint64_t seed = 0; seed < cases; ++seed) {
    CounterRng rng(150000, seed);
    Contract c1 = Contract::make("c1", "S", testgen::random_formula(rng, 2),
                                 testgen::random_formula(rng, 2));
    Contract c2 = Contract::make("c2", "S", testgen::random_formula(rng, 2),
                                 testgen::random_formula(rng, 2));
    Trace tau = testgen::random_trace(rng, 5);
    const FormulaPtr a1 = c1.assumptions, g1 = c1.guarantees;
    const FormulaPtr a2 = c2.assumptions, g2 = c2.guarantees;
    FormulaPtr pair_g =
        f_or(f_and(f_implies(a1, g1), f_implies(a2, g2)), f_and(f_not(a1), f_not(a2)));
    auto direct = [&](FormulaPtr a, FormulaPtr g) {
      Contract raw;
      raw.name = "raw";
      raw.assumptions = std::move(a);
      raw.guarantees = std::move(g);
      return satisfies(tau, raw).counts_as_satisfied();
    };
    if (satisfies(tau, op_compose(c1, c2)).counts_as_satisfied() !=
        direct(f_or(f_or(f_and(a1, a2), f_and(a1, g1)), f_and(a2, g2)), pair_g)) {
      ++mismatches;
    }
    if (satisfies(tau, op_conjoin(c1, c2)).counts_as_satisfied() !=
        direct(f_or(a1, a2), pair_g)) {
      ++mismatches;
    }
    if (satisfies(tau, op_strong_merge(c1, c2)).counts_as_satisfied() !=
        direct(f_and(a1, a2), f_or(f_or(f_and(g1, g2), f_not(a1)), f_not(a2)))) {
      ++mismatches;
    }
    if (satisfies(tau, op_weak_merge(c1, c2)).counts_as_satisfied() !=
        direct(f_or(a1, a2), f_or(f_or(g1, g2), f_not(f_or(a1, a2))))) {
      ++mismatches;
    }
  }
  c.require(mismatches == 0,
            std::to_string(mismatches) + " operator/definition mismatches");

  // Exact probabilities on 64 equiprobable two-step traces.
  std::vector<Trace> universe;
  for (int x0 = 0; x0 < 3 && universe.size() < 64; ++x0) {
    for (int y0 = 0; y0 < 3 && universe.size() < 64; ++y0) {
      for (int x1 = 0; x1 < 3 && universe.size() < 64; ++x1) {
        for (int y1 = 0; y1 < 3 && universe.size() < 64; ++y1) {
          universe.push_back(trace_from_env_steps(
              {{{"x", Rat(x0)}, {"y", Rat(y0)}}, {{"x", Rat(x1)}, {"y", Rat(y1)}}}));
        }
      }
    }
  }
  auto tv_formula = [](CounterRng& rng, int depth) {
    auto rec = [](auto&& self, CounterRng& rng, int depth) -> FormulaPtr {
      if (depth <= 0 || rng.next_below(3) == 0) {
        static const char* vars[] = {"x", "y"};
        return f_atom(static_cast<CmpOp>(rng.next_below(6)), e_var(vars[rng.next_below(2)]),
                      e_const(Rat(static_cast<long>(rng.next_below(3)))));
      }
      switch (rng.next_below(6)) {
        case 0: return f_not(self(self, rng, depth - 1));
        case 1: return f_and(self(self, rng, depth - 1), self(self, rng, depth - 1));
        case 2: return f_or(self(self, rng, depth - 1), self(self, rng, depth - 1));
        case 3: return f_always(self(self, rng, depth - 1));
        case 4: return f_eventually(self(self, rng, depth - 1));
        default: return f_until(self(self, rng, depth - 1), self(self, rng, depth - 1));
      }
    };
    return rec(rec, rng, depth);
  };
  auto prob = [&](const Contract& k) {
    std::size_t n = 0;
    for (const auto& tau : universe) {
      if (satisfies(tau, k).counts_as_satisfied()) ++n;
    }
    return static_cast<double>(n) / static_cast<double>(universe.size());
  };
  std::size_t informative = 0;
  for (std::uint64_t seed = 0; seed < 400; ++seed) {
    CounterRng rng(160000, seed);
    Contract c1 = Contract::make("c1", "S", tv_formula(rng, 2), tv_formula(rng, 2));
    Contract c2 = Contract::make("c2", "S", tv_formula(rng, 2), tv_formula(rng, 2));
    double joint = 0.0;
    for (const auto& tau : universe) {
      if (satisfies(tau, c1).counts_as_satisfied() &&
          satisfies(tau, c2).counts_as_satisfied()) {
        joint += 1.0;
      }
    }
    joint /= static_cast<double>(universe.size());

    // Conjunction satisfaction equals the joint exactly; the composed
    // contract equals it on traces meeting the composed assumptions and
    // dominates it elsewhere.
    c.require(std::abs(prob(op_conjoin(c1, c2)) - joint) < 1e-12,
              "conjunction probability != joint probability");
    Contract composed = op_compose(c1, c2);
    c.require(prob(composed) >= joint - 1e-12, "composition probability below joint");
    std::size_t comp_in_scope = 0, joint_in_scope = 0;
    for (const auto& tau : universe) {
      if (!trace_satisfies(*composed.assumptions, tau)) continue;
      if (satisfies(tau, composed).counts_as_satisfied()) ++comp_in_scope;
      if (satisfies(tau, c1).counts_as_satisfied() &&
          satisfies(tau, c2).counts_as_satisfied()) {
        ++joint_in_scope;
      }
    }
    c.require(comp_in_scope == joint_in_scope,
              "composition != joint under the composed assumptions");

    // Union bound never exceeds the exact joint probability.
    double p1 = prob(c1), p2 = prob(c2);
    c.require(std::max(0.0, p1 + p2 - 1.0) <= joint + 1e-12,
              "union bound exceeds the exact joint probability");

    // Weak merge mixture bound with exact conditionals.
    std::size_t a1_count = 0, c1_given_a1 = 0, c2_given_not_a1 = 0;
    for (const auto& tau : universe) {
      if (trace_satisfies(*c1.assumptions, tau)) {
        ++a1_count;
        if (satisfies(tau, c1).counts_as_satisfied()) ++c1_given_a1;
      } else if (satisfies(tau, c2).counts_as_satisfied()) {
        ++c2_given_not_a1;
      }
    }
    if (a1_count == 0 || a1_count == universe.size()) continue;
    ++informative;
    double p_a1 = static_cast<double>(a1_count) / universe.size();
    double cp1 = static_cast<double>(c1_given_a1) / a1_count;
    double cp2 = static_cast<double>(c2_given_not_a1) / (universe.size() - a1_count);
    c.require(prob(op_weak_merge(c1, c2)) >= cp1 * p_a1 + cp2 * (1.0 - p_a1) - 1e-12,
              "weak merge probability below the mixture bound");
  }
  c.require(informative > 100, "too few informative weak-merge instances");

  double elapsed = seconds_since(t0);
  c.require(elapsed < 60.0, "criterion exceeded 60 s");
  if (c.pass) {
    std::ostringstream os;
    os << cases << " operator cases, 400 toy distributions, " << elapsed << " s";
    c.detail = os.str();
  }
  return c;
}

// ---- 6. safety filter model check + in-band episodes ----
Criterion criterion_safety() {
  Criterion c;
  auto t0 = std::chrono::steady_clock::now();
  aeb::ReachabilityResult reach = aeb::run_safety_reachability();
  c.require(reach.safe, "reachability check found a violation: " + reach.violation);
  std::uint64_t violations = aeb::count_safety_violations(100000, 20260808, 2);
  c.require(violations == 0,
            std::to_string(violations) + " in-band episodes dipped to the safety floor");
  double elapsed = seconds_since(t0);
  c.require(elapsed < 600.0, "criterion exceeded 10 min");
  if (c.pass) {
    std::ostringstream os;
    os << reach.states_explored << " reachable states safe, 100000 episodes clean, "
       << elapsed << " s";
    c.detail = os.str();
  }
  return c;
}

// ---- 7. optimized dominates naive on identical scene streams ----
Criterion criterion_dominance() {
  Criterion c;
  auto t0 = std::chrono::steady_clock::now();
  for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
    for (std::uint64_t budget : {500ull, 1000ull, 5000ull}) {
      aeb::CampaignConfig cfg;
      cfg.samples = budget;
      cfg.confidence = 0.999;
      cfg.seed = seed;
      cfg.workers = 2;
      cfg.mode = aeb::CampaignMode::Naive;
      aeb::CampaignResult naive = aeb::run_campaign(cfg);
      cfg.mode = aeb::CampaignMode::Optimized;
      aeb::CampaignResult optimized = aeb::run_campaign(cfg);
      std::ostringstream why;
      why << "optimized bound " << optimized.top->bound.p << " < naive "
          << naive.top->bound.p << " at seed " << seed << ", budget " << budget;
      c.require(optimized.top->bound.p >= naive.top->bound.p, why.str());
      c.require(std::abs(naive.top->bound.c - 0.998001) <= 1e-12,
                "naive confidence != 0.998001");
      c.require(std::abs(optimized.top->bound.c - 0.998001) <= 1e-12,
                "optimized confidence != 0.998001");
    }
  }
  double fraction = aeb::static_pass_fraction(10000, 424242);
  std::ostringstream why;
  why << "static-pass fraction " << fraction << " outside 0.35 +- 0.02";
  c.require(std::abs(fraction - 0.35) <= 0.02, why.str());
  double elapsed = seconds_since(t0);
  c.require(elapsed < 900.0, "criterion exceeded 15 min");
  if (c.pass) {
    std::ostringstream os;
    os << "9 campaign pairs dominated, static fraction " << fraction << ", " << elapsed
       << " s";
    c.detail = os.str();
  }
  return c;
}

// ---- 8. determinism across worker counts ----
Criterion criterion_determinism() {
  Criterion c;
  for (const char* mode : {"naive", "optimized"}) {
    std::ostringstream spec_json;
    spec_json << "{\"scenario\":\"aeb\",\"mode\":\"" << mode
              << "\",\"samples\":300,\"confidence\":0.999,\"seed\":5}";
    CampaignSpec spec = parse_campaign_spec(spec_json.str());
    spec.workers = 1;
    CampaignOutputs serial = run_campaign_spec(spec);
    spec.workers = 4;
    CampaignOutputs parallel = run_campaign_spec(spec);
    c.require(serial.evidence_json == parallel.evidence_json,
              std::string(mode) + " evidence JSON differs between 1 and 4 workers");
  }
  if (c.pass) c.detail = "naive and optimized byte-identical for 1 and 4 workers";
  return c;
}

// ---- 9. golden assurance case ----
Criterion criterion_golden() {
  Criterion c;
  CampaignSpec spec = parse_campaign_spec(
      "{\"scenario\":\"aeb\",\"mode\":\"naive\",\"samples\":200,\"confidence\":0.999,"
      "\"seed\":42}");
  CampaignOutputs out = run_campaign_spec(spec);
  std::ifstream golden_file(std::string(CPV_TEST_DATA_DIR) + "/../golden/naive_case.txt");
  c.require(static_cast<bool>(golden_file), "golden file missing");
  if (golden_file) {
    std::stringstream golden;
    golden << golden_file.rdbuf();
    c.require(out.case_text == golden.str(), "rendered case differs from the golden file");
  }
  for (const char* section : {"Minimum", "Assumptions:", "Guarantees:", "Evidence:",
                              "Verified,", "Rejected,", "A-Violated,", "G-Violated"}) {
    c.require(out.case_text.find(section) != std::string::npos,
              std::string("rendered case lacks section ") + section);
  }
  if (c.pass) c.detail = "byte-identical to golden/naive_case.txt";
  return c;
}

}  // namespace

int main() {
  struct Entry {
    const char* name;
    Criterion (*fn)();
  };
  const Entry entries[] = {
      {"1. union-bound arithmetic (91.55 / 94.59 at confidence 0.998001)",
       criterion_union_bound},
      {"2. testing-based weak merge bookkeeping (5322/5519, 96.43%)",
       criterion_kwt_bookkeeping},
      {"3. Clopper-Pearson bound vs exact-tail oracle + coverage", criterion_clopper_pearson},
      {"4. LTLf evaluator vs brute-force reference semantics", criterion_evaluator_oracle},
      {"5. operator semantics oracle + toy-distribution probabilities",
       criterion_operator_oracle},
      {"6. safety-filter reachability + 1e5 in-band episodes", criterion_safety},
      {"7. optimized dominates naive; static fraction 0.35 +- 0.02", criterion_dominance},
      {"8. byte-identical evidence across 1 and 4 workers", criterion_determinism},
      {"9. golden assurance case", criterion_golden},
  };
  int failures = 0;
  for (const Entry& e : entries) {
    Criterion result = e.fn();
    std::cout << (result.pass ? "PASS" : "FAIL") << "  " << e.name;
    if (!result.detail.empty()) std::cout << "  [" << result.detail << "]";
    std::cout << "\n" << std::flush;
    if (!result.pass) ++failures;
  }
  return failures;
}
