#pragma once

#include "cpv/evidence.hpp"

#include <optional>
#include <variant>

namespace cpv {

struct IndependenceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// ---- Contract operators ----
//
// Outputs are built syntactically from the operand formulas and then passed
// through simplify(); simplification is semantics-preserving.

// Composition:  A = (A1&A2) | (A1&G1) | (A2&G2)
//               G = ((A1=>G1) & (A2=>G2)) | (!A1 & !A2)
Contract op_compose(const Contract& c1, const Contract& c2);

// Conjunction:  A = A1 | A2, same G as composition.
Contract op_conjoin(const Contract& c1, const Contract& c2);

// Strong merge: A = A1 & A2, G = (G1&G2) | !A1 | !A2.
Contract op_strong_merge(const Contract& c1, const Contract& c2);

// Weak merge:   A = A1 | A2, G = G1 | G2 | !(A1 | A2).
Contract op_weak_merge(const Contract& c1, const Contract& c2);

// ---- Refinement ----

struct RefinementCounterexample {
  Trace trace;
  std::string summary;
};

using RefinementOutcome = std::variant<RefinementWitness, RefinementCounterexample>;

// Establishes c1 <= c2.
//   Syntactic: structural equality of the (A, G) pairs.
//   ExhaustiveFiniteDomain: checks (A2 => A1) & ((A1 => G1) => (A2 => G2))
//     on every trace of the given domain; the witness records that scope.
//   ExternalCertificate: delegates to the checker; the certificate payload
//     stands in for the refinement proof.
RefinementOutcome check_refinement(const Contract& c1, const Contract& c2,
                                   RefinementWitness::Method method,
                                   const DomainSpec* domain = nullptr,
                                   const ProofChecker* checker = nullptr,
                                   const ProofCertificate* certificate = nullptr);

// Transfers evidence along a validated refinement witness: the bound carries
// over unchanged.
EvidencePtr refine(const EvidencePtr& e1, const RefinementWitness& witness,
                   const Contract& target);

// ---- Combination rules ----

enum class UnionOp { Compose, Conjoin, StrongMerge };

// Union-bound rule: bound (max(0, p1+p2-1), c1*c2) for the operator's output
// contract. Refuses evidence whose test leaves share provenance.
EvidencePtr combine_union(const EvidencePtr& e1, const EvidencePtr& e2, UnionOp op);

// Weak merge rule: e1 verified under T|A1, e2 under T|!A1, combined as the
// mixture p1*pA1 + p2*(1-pA1) at confidence c1*c2. pA1 needs its own
// provenance (assumed or estimated).
EvidencePtr combine_weak_merge(const EvidencePtr& e1, const EvidencePtr& e2, double p_a1,
                               const std::string& p_a1_provenance);

// Testing-based weak merge checking: verifies the certificate for c1, then
// samples n scenes; scenes whose initial state satisfies the statically
// decidable part of A1 count as satisfied without simulation, the remainder
// is simulated and checked against c2. A1-conjuncts shared with A2 are
// exempt from the static-decidability requirement.
EvidencePtr weak_merge_tested(const ProofCertificate& certificate, const ProofChecker& checker,
                              const Contract& c1, const Contract& c2, const TestBinding& binding,
                              const TestRunConfig& cfg);

// Splits A1's top-level conjuncts into (shared with A2, non-shared) and
// returns the non-shared conjunction, or an error message when a non-shared
// conjunct is not statically decidable for the scenario's scene variables.
std::variant<FormulaPtr, std::string> static_partition_condition(
    const Contract& c1, const Contract& c2, const std::set<std::string>& scene_vars);

}  // namespace cpv
