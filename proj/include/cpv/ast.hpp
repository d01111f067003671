#pragma once

#include "cpv/rational.hpp"

#include <memory>
#include <set>
#include <string>
#include <variant>
#include <vector>

namespace cpv {

struct Expr;
struct Formula;
using ExprPtr = std::shared_ptr<const Expr>;
using FormulaPtr = std::shared_ptr<const Formula>;

enum class BinOp { Add, Sub, Mul, Div };
enum class FuncOp { Min, Max, Floor, Ceil, Abs };
enum class CmpOp { Le, Lt, Ge, Gt, Eq, Ne };

// ---- Expression nodes -----------------------------------------------------
//
// Value-level terms inside atoms. `NextShift` is the value-level next: it
// reads its operand one step later, and nests (depth d = value at t+d).

struct ExprConst {
  Rat value;
};
struct ExprVar {
  std::string path;  // dotted path ("self.speed") or subscript ("params['weather']")
};
struct ExprNeg {
  ExprPtr arg;
};
struct ExprBin {
  BinOp op;
  ExprPtr lhs, rhs;
};
struct ExprCall {
  FuncOp fn;
  std::vector<ExprPtr> args;  // 2 for min/max, 1 for floor/ceil/abs
};
struct ExprNextShift {
  ExprPtr arg;
};

struct Expr {
  std::variant<ExprConst, ExprVar, ExprNeg, ExprBin, ExprCall, ExprNextShift> node;
};

// ---- Formula nodes ---------------------------------------------------------
//
// LTLf over atoms. Atoms never contain temporal operators; value-level next
// lives in Expr.

struct FAtom {
  CmpOp op;
  ExprPtr lhs, rhs;
};
struct FBool {
  bool value;
};
struct FNot {
  FormulaPtr arg;
};
struct FAnd {
  FormulaPtr lhs, rhs;
};
struct FOr {
  FormulaPtr lhs, rhs;
};
struct FImplies {
  FormulaPtr lhs, rhs;
};
struct FIff {
  FormulaPtr lhs, rhs;
};
struct FNext {
  FormulaPtr arg;  // strong next: false at the last position
};
struct FAlways {
  FormulaPtr arg;
};
struct FEventually {
  FormulaPtr arg;
};
struct FUntil {
  FormulaPtr lhs, rhs;
};

struct Formula {
  std::variant<FAtom, FBool, FNot, FAnd, FOr, FImplies, FIff, FNext, FAlways,
               FEventually, FUntil>
      node;
};

// ---- Builders ---------------------------------------------------------------

ExprPtr e_const(Rat v);
ExprPtr e_var(std::string path);
ExprPtr e_neg(ExprPtr a);
ExprPtr e_bin(BinOp op, ExprPtr l, ExprPtr r);
ExprPtr e_call(FuncOp fn, std::vector<ExprPtr> args);
ExprPtr e_next(ExprPtr a);

FormulaPtr f_atom(CmpOp op, ExprPtr l, ExprPtr r);
FormulaPtr f_bool(bool v);
FormulaPtr f_not(FormulaPtr a);
FormulaPtr f_and(FormulaPtr l, FormulaPtr r);
FormulaPtr f_or(FormulaPtr l, FormulaPtr r);
FormulaPtr f_implies(FormulaPtr l, FormulaPtr r);
FormulaPtr f_iff(FormulaPtr l, FormulaPtr r);
FormulaPtr f_next(FormulaPtr a);
FormulaPtr f_always(FormulaPtr a);
FormulaPtr f_eventually(FormulaPtr a);
FormulaPtr f_until(FormulaPtr l, FormulaPtr r);

// ---- Structural queries ------------------------------------------------------

bool expr_equal(const Expr& a, const Expr& b);
bool formula_equal(const Formula& a, const Formula& b);

void collect_vars(const Expr& e, std::set<std::string>& out);
void collect_vars(const Formula& f, std::set<std::string>& out);
std::set<std::string> formula_vars(const Formula& f);

bool contains_next_shift(const Expr& e);
// Flattens nested conjunctions at the root into a conjunct list.
std::vector<FormulaPtr> top_conjuncts(const FormulaPtr& f);

// ---- Contract ----------------------------------------------------------------

struct Contract {
  std::string name;
  std::string subject;  // component the contract is about (rendering only)
  FormulaPtr assumptions;
  FormulaPtr guarantees;
  std::set<std::string> signature;  // variable paths read by A and G

  static Contract make(std::string name, std::string subject, FormulaPtr a,
                       FormulaPtr g);
};

bool contract_equal(const Contract& a, const Contract& b);

// Stable content hash over the canonical JSON form; used for certificate and
// scenario identification in evidence and the external checker protocol.
std::string contract_hash(const Contract& c);
std::string stable_hash_hex(const std::string& bytes);

// ---- JSON (stable, node-kind tagged) -----------------------------------------

std::string expr_to_json(const Expr& e);
std::string formula_to_json(const Formula& f);
ExprPtr expr_from_json_text(const std::string& text);
FormulaPtr formula_from_json_text(const std::string& text);

}  // namespace cpv
