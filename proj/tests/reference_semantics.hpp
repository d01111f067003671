#pragma once

// Test-only reference semantics: the finite-trace rules written as direct
// recursion, independent of the table-based evaluator in src/eval.cpp.
// Until uses the expanded witness form rather than the backward recursion.

#include "cpv/ast.hpp"
#include "cpv/eval.hpp"
#include "cpv/trace.hpp"

namespace cpv::testref {

inline std::optional<Rat> ref_expr(const Expr& e, const Trace& tau, std::size_t t,
                                   std::size_t shift) {
  if (const auto* c = std::get_if<ExprConst>(&e.node)) return c->value;
  if (const auto* v = std::get_if<ExprVar>(&e.node)) {
    if (t + shift >= tau.length()) return std::nullopt;
    return tau.lookup(v->path, t + shift);
  }
  if (const auto* n = std::get_if<ExprNeg>(&e.node)) {
    auto a = ref_expr(*n->arg, tau, t, shift);
    if (!a) return std::nullopt;
    return Rat(-*a);
  }
  if (const auto* b = std::get_if<ExprBin>(&e.node)) {
    auto l = ref_expr(*b->lhs, tau, t, shift);
    auto r = ref_expr(*b->rhs, tau, t, shift);
    if (!l || !r) return std::nullopt;
    switch (b->op) {
      case BinOp::Add: return *l + *r;
      case BinOp::Sub: return *l - *r;
      case BinOp::Mul: return *l * *r;
      case BinOp::Div: return *r == 0 ? std::nullopt : std::optional<Rat>(*l / *r);
    }
  }
  if (const auto* call = std::get_if<ExprCall>(&e.node)) {
    std::vector<Rat> vals;
    for (const auto& a : call->args) {
      auto v = ref_expr(*a, tau, t, shift);
      if (!v) return std::nullopt;
      vals.push_back(*v);
    }
    switch (call->fn) {
      case FuncOp::Min: return std::min(vals[0], vals[1]);
      case FuncOp::Max: return std::max(vals[0], vals[1]);
      case FuncOp::Floor: return rat_floor(vals[0]);
      case FuncOp::Ceil: return rat_ceil(vals[0]);
      case FuncOp::Abs: return rat_abs(vals[0]);
    }
  }
  return ref_expr(*std::get<ExprNextShift>(e.node).arg, tau, t, shift + 1);
}

inline TruthValue ref_eval(const Formula& f, const Trace& tau, std::size_t t) {
  const std::size_t m = tau.length();
  if (const auto* a = std::get_if<FAtom>(&f.node)) {
    auto l = ref_expr(*a->lhs, tau, t, 0);
    auto r = ref_expr(*a->rhs, tau, t, 0);
    if (!l || !r) return TruthValue::Undefined;
    bool v = false;
    switch (a->op) {
      case CmpOp::Le: v = *l <= *r; break;
      case CmpOp::Lt: v = *l < *r; break;
      case CmpOp::Ge: v = *l >= *r; break;
      case CmpOp::Gt: v = *l > *r; break;
      case CmpOp::Eq: v = *l == *r; break;
      case CmpOp::Ne: v = *l != *r; break;
    }
    return v ? TruthValue::True : TruthValue::False;
  }
  if (const auto* b = std::get_if<FBool>(&f.node)) {
    return b->value ? TruthValue::True : TruthValue::False;
  }
  if (const auto* n = std::get_if<FNot>(&f.node)) return tv_not(ref_eval(*n->arg, tau, t));
  if (const auto* x = std::get_if<FAnd>(&f.node)) {
    return tv_and(ref_eval(*x->lhs, tau, t), ref_eval(*x->rhs, tau, t));
  }
  if (const auto* x = std::get_if<FOr>(&f.node)) {
    return tv_or(ref_eval(*x->lhs, tau, t), ref_eval(*x->rhs, tau, t));
  }
  if (const auto* x = std::get_if<FImplies>(&f.node)) {
    return tv_or(tv_not(ref_eval(*x->lhs, tau, t)), ref_eval(*x->rhs, tau, t));
  }
  if (const auto* x = std::get_if<FIff>(&f.node)) {
    TruthValue l = ref_eval(*x->lhs, tau, t);
    TruthValue r = ref_eval(*x->rhs, tau, t);
    if (l == TruthValue::Undefined || r == TruthValue::Undefined) return TruthValue::Undefined;
    return l == r ? TruthValue::True : TruthValue::False;
  }
  if (const auto* x = std::get_if<FNext>(&f.node)) {
    return t + 1 < m ? ref_eval(*x->arg, tau, t + 1) : TruthValue::False;
  }
  if (const auto* x = std::get_if<FAlways>(&f.node)) {
    for (std::size_t i = t; i < m; ++i) {
      if (ref_eval(*x->arg, tau, i) == TruthValue::False) return TruthValue::False;
    }
    return TruthValue::True;
  }
  if (const auto* x = std::get_if<FEventually>(&f.node)) {
    for (std::size_t i = t; i < m; ++i) {
      if (ref_eval(*x->arg, tau, i) == TruthValue::True) return TruthValue::True;
    }
    return TruthValue::False;
  }
  const auto& u = std::get<FUntil>(f.node);
  // Witness expansion: OR_j (rhs@j AND AND_{t<=i<j} lhs@i) in Kleene logic.
  TruthValue acc = TruthValue::False;
  for (std::size_t j = t; j < m; ++j) {
    TruthValue term = ref_eval(*u.rhs, tau, j);
    for (std::size_t i = t; i < j; ++i) {
      term = tv_and(term, ref_eval(*u.lhs, tau, i));
    }
    acc = tv_or(acc, term);
  }
  return acc;
}

inline bool ref_satisfied(const Formula& f, const Trace& tau) {
  TruthValue v = ref_eval(f, tau, 0);
  if (v != TruthValue::Undefined) return v == TruthValue::True;
  return std::holds_alternative<FAlways>(f.node);
}

}  // namespace cpv::testref
