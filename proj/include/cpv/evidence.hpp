#pragma once

#include "cpv/ast.hpp"
#include "cpv/component.hpp"
#include "cpv/scenario.hpp"
#include "cpv/stats.hpp"
#include "cpv/trace.hpp"

#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace cpv {

struct CampaignError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A checker refusing a certificate (budget exceeded, unusable domain) is not
// a rejection of the contract; it propagates as an error.
struct CheckerRefusal : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// ---- Certificates and checkers ----

// One grid dimension of a finite domain. scene_constant grids keep their
// value across all steps of an enumerated trace.
struct VarGrid {
  std::string path;
  std::vector<Rat> values;
  bool scene_constant = false;
};

// The finite domain a built-in certificate is checked over: grids per
// variable, a trace length bound, and optionally a component that fills its
// ports at every enumerated step (inputs are looked up in the grid
// assignment by port name).
struct DomainSpec {
  std::vector<VarGrid> grids;
  std::size_t trace_len = 1;
  std::uint64_t node_budget = 4000000;
  const Component* component = nullptr;
  std::string description;

  std::uint64_t enumeration_size() const;
};

struct ProofCertificate {
  std::string id;
  std::string target_contract_hash;
  std::optional<DomainSpec> domain;  // for the built-in exhaustive checker
  std::string payload;               // opaque bytes for external checkers

  std::string payload_hash() const;
};

struct CheckResult {
  bool accepted = false;
  std::string scope;       // what was actually established (finite domain, ...)
  std::string diagnostic;  // why a certificate was not accepted
};

// A checker must accept only when the contract holds on all traces of the
// scope it documents.
class ProofChecker {
 public:
  virtual ~ProofChecker() = default;
  virtual std::string id() const = 0;
  virtual CheckResult check(const ProofCertificate& certificate,
                            const Contract& contract) const = 0;
};

// ---- Evidence ----

enum class EvidenceKind {
  Test,
  Proof,
  Assumption,
  Refined,
  Composed,
  Conjoined,
  StrongMerged,
  WeakMerged,
  WeakMergeTested,
};

const char* evidence_kind_name(EvidenceKind k);

struct RefinementWitness {
  enum class Method { Syntactic, ExhaustiveFiniteDomain, ExternalCertificate };
  Method method = Method::Syntactic;
  std::string scope;  // printed in the assurance case
  Contract from;
  Contract to;
};

const char* witness_method_name(RefinementWitness::Method m);

// Leaf provenance used to enforce that combined evidence was derived
// independently: two Test leaves sharing (scenario hash, seed) with
// overlapping substream ranges refuse to combine.
struct TestProvenance {
  std::string scenario_id;
  std::string scenario_hash;
  std::uint64_t seed = 0;
  std::uint64_t stream_lo = 0;
  std::uint64_t stream_hi = 0;  // exclusive
  std::string condition;        // conditional-distribution marker, if any
};

struct Evidence;
using EvidencePtr = std::shared_ptr<const Evidence>;

struct Evidence {
  Contract contract;
  ProbBound bound;
  EvidenceKind kind = EvidenceKind::Assumption;
  std::vector<EvidencePtr> children;

  std::optional<TestingOutcome> testing;
  std::optional<TestProvenance> test_provenance;
  std::optional<std::string> checker_id;
  std::optional<std::string> certificate_id;
  std::optional<std::string> checker_scope;
  std::optional<std::string> diagnostic;
  std::optional<std::string> justification;
  std::optional<RefinementWitness> witness;
  std::optional<double> p_a1;  // mixing probability of the weak merge rule
  std::optional<std::string> p_a1_provenance;
};

// ---- Base verification procedures ----

struct TestBinding {
  const Scenario* scenario = nullptr;
  const Component* component = nullptr;
  // Statically decidable condition restricting the scene distribution
  // (conditional testing for the weak merge rule); empty = unconditioned.
  FormulaPtr condition;
  std::string condition_text;
};

struct TestRunConfig {
  std::uint64_t samples = 0;
  double confidence = 0.0;
  std::uint64_t seed = 0;
  std::uint64_t stream_base = 0;
  unsigned workers = 1;
  bool record_timing = false;   // off by default: evidence stays byte-stable
  std::ostream* trace_log = nullptr;
};

// Simulation testing: draws scenes (rejections counted, excluded from the
// effective sample size), classifies each trace, and converts the count into
// a Clopper-Pearson lower bound at the requested confidence.
EvidencePtr verify_testing(const Contract& contract, const TestBinding& binding,
                           const TestRunConfig& cfg);

// Replays a stored trace log instead of re-simulating.
EvidencePtr verify_testing_replay(const Contract& contract, const std::vector<TraceLogEntry>& log,
                                  const TestRunConfig& cfg, const std::string& scenario_hash);

// Proof-based procedure: (1,1) when the checker accepts the certificate for
// exactly this contract, (0,1) otherwise. Checker crashes yield (0,1) with a
// diagnostic; CheckerRefusal propagates.
EvidencePtr verify_proof(const ProofCertificate& certificate, const ProofChecker& checker,
                         const Contract& contract);

// Declared assumption at (p, c); flagged in the assurance case as
// unverified by this tool.
EvidencePtr verify_assumption(const Contract& contract, double p, double c,
                              const std::string& justification);

}  // namespace cpv
