#pragma once

#include "cpv/ast.hpp"
#include "cpv/trace.hpp"

#include <optional>
#include <set>
#include <string>
#include <vector>

namespace cpv {

// Third value of the finite-trace semantics: a value-level next that runs
// off the end of the trace, a missing variable, or a division by zero.
enum class TruthValue { False, True, Undefined };

TruthValue tv_not(TruthValue v);
TruthValue tv_and(TruthValue a, TruthValue b);
TruthValue tv_or(TruthValue a, TruthValue b);

struct EvalDiagnostics {
  std::vector<std::string> missing_vars;
  std::vector<std::string> division_by_zero;  // rendered divisor expressions

  bool trace_unusable() const { return !missing_vars.empty(); }
};

// Value of e on tau at step t (+ accumulated next-shift depth). Undefined
// when a shifted variable lookup lands past the end of the trace, when a
// variable is absent, or on division by zero.
std::optional<Rat> eval_expr(const Expr& e, const Trace& tau, std::size_t t,
                             EvalDiagnostics* diag = nullptr);

// LTLf semantics over positions t..len-1 with strong Next, three-valued
// atoms, Kleene and/or/not, vacuous-Undefined Always and True-witness
// Eventually. Computed bottom-up over (subformula, position) tables.
TruthValue eval_formula(const Formula& f, const Trace& tau, std::size_t t,
                        EvalDiagnostics* diag = nullptr);

// Boolean satisfaction of f on tau from position 0: a residual Undefined at
// the top coerces to true when the root is Always and to false otherwise.
bool trace_satisfies(const Formula& f, const Trace& tau, EvalDiagnostics* diag = nullptr);

enum class Satisfaction {
  Verified,   // assumptions held, guarantees held
  AViolated,  // assumptions failed: contract vacuously satisfied
  GViolated,  // assumptions held, guarantees failed
};

struct SatisfactionResult {
  Satisfaction value = Satisfaction::Verified;
  EvalDiagnostics diagnostics;

  // Verified and AViolated both count toward the satisfaction count k.
  bool counts_as_satisfied() const { return value != Satisfaction::GViolated; }
};

struct MissingVariableError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Classifies tau against C. Throws MissingVariableError when a signature
// variable is absent from the trace (the caller excludes the trace and
// reports the diagnostic; this is distinct from scene rejection).
SatisfactionResult satisfies(const Trace& tau, const Contract& c);

// True iff f is decidable from the initial state alone: every variable is a
// scene variable and f contains no value-level shift and no temporal Next
// (whose strong semantics depends on the trace length).
bool statically_decidable(const Formula& f, const std::set<std::string>& scene_vars);

// Semantics-preserving cleanup: identity/annihilator laws for and/or with
// boolean constants, double negation, implications with constant
// antecedent, and constant folds of always/eventually/until (sound because
// traces have length >= 1).
FormulaPtr simplify(const FormulaPtr& f);

}  // namespace cpv
