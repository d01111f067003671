#include "cpv/eval.hpp"

#include "cpv/printer.hpp"

namespace cpv {

TruthValue tv_not(TruthValue v) {
  if (v == TruthValue::Undefined) return TruthValue::Undefined;
  return v == TruthValue::True ? TruthValue::False : TruthValue::True;
}

TruthValue tv_and(TruthValue a, TruthValue b) {
  if (a == TruthValue::False || b == TruthValue::False) return TruthValue::False;
  if (a == TruthValue::Undefined || b == TruthValue::Undefined) return TruthValue::Undefined;
  return TruthValue::True;
}

TruthValue tv_or(TruthValue a, TruthValue b) {
  if (a == TruthValue::True || b == TruthValue::True) return TruthValue::True;
  if (a == TruthValue::Undefined || b == TruthValue::Undefined) return TruthValue::Undefined;
  return TruthValue::False;
}

namespace {

std::optional<Rat> eval_expr_at(const Expr& e, const Trace& tau, std::size_t t,
                                std::size_t shift, EvalDiagnostics* diag) {
  return std::visit(
      [&](const auto& x) -> std::optional<Rat> {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, ExprConst>) {
          return x.value;
        } else if constexpr (std::is_same_v<T, ExprVar>) {
          std::size_t idx = t + shift;
          if (idx >= tau.length()) return std::nullopt;
          auto v = tau.lookup(x.path, idx);
          if (!v && diag) diag->missing_vars.push_back(x.path);
          return v;
        } else if constexpr (std::is_same_v<T, ExprNeg>) {
          auto v = eval_expr_at(*x.arg, tau, t, shift, diag);
          if (!v) return std::nullopt;
          return Rat(-*v);
        } else if constexpr (std::is_same_v<T, ExprBin>) {
          auto l = eval_expr_at(*x.lhs, tau, t, shift, diag);
          auto r = eval_expr_at(*x.rhs, tau, t, shift, diag);
          if (!l || !r) return std::nullopt;
          switch (x.op) {
            case BinOp::Add: return *l + *r;
            case BinOp::Sub: return *l - *r;
            case BinOp::Mul: return *l * *r;
            case BinOp::Div:
              if (*r == 0) {
                if (diag) diag->division_by_zero.push_back(render_expr(*x.rhs));
                return std::nullopt;
              }
              return *l / *r;
          }
          return std::nullopt;
        } else if constexpr (std::is_same_v<T, ExprCall>) {
          std::vector<Rat> vals;
          vals.reserve(x.args.size());
          for (const auto& a : x.args) {
            auto v = eval_expr_at(*a, tau, t, shift, diag);
            if (!v) return std::nullopt;
            vals.push_back(*v);
          }
          switch (x.fn) {
            case FuncOp::Min: return std::min(vals[0], vals[1]);
            case FuncOp::Max: return std::max(vals[0], vals[1]);
            case FuncOp::Floor: return rat_floor(vals[0]);
            case FuncOp::Ceil: return rat_ceil(vals[0]);
            case FuncOp::Abs: return rat_abs(vals[0]);
          }
          return std::nullopt;
        } else {
          return eval_expr_at(*std::get<ExprNextShift>(e.node).arg, tau, t, shift + 1, diag);
        }
      },
      e.node);
}

TruthValue compare(CmpOp op, const Rat& l, const Rat& r) {
  bool v = false;
  switch (op) {
    case CmpOp::Le: v = l <= r; break;
    case CmpOp::Lt: v = l < r; break;
    case CmpOp::Ge: v = l >= r; break;
    case CmpOp::Gt: v = l > r; break;
    case CmpOp::Eq: v = l == r; break;
    case CmpOp::Ne: v = l != r; break;
  }
  return v ? TruthValue::True : TruthValue::False;
}

// Values of f at every position, computed bottom-up: one table per
// subformula, suffix scans for the temporal operators.
std::vector<TruthValue> eval_all(const Formula& f, const Trace& tau, EvalDiagnostics* diag) {
  const std::size_t m = tau.length();
  return std::visit(
      [&](const auto& x) -> std::vector<TruthValue> {
        using T = std::decay_t<decltype(x)>;
        std::vector<TruthValue> out(m);
        if constexpr (std::is_same_v<T, FAtom>) {
          for (std::size_t t = 0; t < m; ++t) {
            auto l = eval_expr_at(*x.lhs, tau, t, 0, diag);
            auto r = eval_expr_at(*x.rhs, tau, t, 0, diag);
            out[t] = (l && r) ? compare(x.op, *l, *r) : TruthValue::Undefined;
          }
        } else if constexpr (std::is_same_v<T, FBool>) {
          std::fill(out.begin(), out.end(), x.value ? TruthValue::True : TruthValue::False);
        } else if constexpr (std::is_same_v<T, FNot>) {
          auto a = eval_all(*x.arg, tau, diag);
          for (std::size_t t = 0; t < m; ++t) out[t] = tv_not(a[t]);
        } else if constexpr (std::is_same_v<T, FAnd>) {
          auto l = eval_all(*x.lhs, tau, diag);
          auto r = eval_all(*x.rhs, tau, diag);
          for (std::size_t t = 0; t < m; ++t) out[t] = tv_and(l[t], r[t]);
        } else if constexpr (std::is_same_v<T, FOr>) {
          auto l = eval_all(*x.lhs, tau, diag);
          auto r = eval_all(*x.rhs, tau, diag);
          for (std::size_t t = 0; t < m; ++t) out[t] = tv_or(l[t], r[t]);
        } else if constexpr (std::is_same_v<T, FImplies>) {
          auto l = eval_all(*x.lhs, tau, diag);
          auto r = eval_all(*x.rhs, tau, diag);
          for (std::size_t t = 0; t < m; ++t) out[t] = tv_or(tv_not(l[t]), r[t]);
        } else if constexpr (std::is_same_v<T, FIff>) {
          auto l = eval_all(*x.lhs, tau, diag);
          auto r = eval_all(*x.rhs, tau, diag);
          for (std::size_t t = 0; t < m; ++t) {
            if (l[t] == TruthValue::Undefined || r[t] == TruthValue::Undefined) {
              out[t] = TruthValue::Undefined;
            } else {
              out[t] = l[t] == r[t] ? TruthValue::True : TruthValue::False;
            }
          }
        } else if constexpr (std::is_same_v<T, FNext>) {
          auto a = eval_all(*x.arg, tau, diag);
          for (std::size_t t = 0; t < m; ++t) {
            out[t] = (t + 1 < m) ? a[t + 1] : TruthValue::False;
          }
        } else if constexpr (std::is_same_v<T, FAlways>) {
          // Undefined positions are vacuously satisfied; the result is
          // always two-valued.
          auto a = eval_all(*x.arg, tau, diag);
          TruthValue acc = TruthValue::True;
          for (std::size_t t = m; t-- > 0;) {
            if (a[t] == TruthValue::False) acc = TruthValue::False;
            out[t] = acc;
          }
        } else if constexpr (std::is_same_v<T, FEventually>) {
          // Only a True position witnesses; Undefined does not.
          auto a = eval_all(*x.arg, tau, diag);
          TruthValue acc = TruthValue::False;
          for (std::size_t t = m; t-- > 0;) {
            if (a[t] == TruthValue::True) acc = TruthValue::True;
            out[t] = acc;
          }
        } else {
          auto l = eval_all(*x.lhs, tau, diag);
          auto r = eval_all(*x.rhs, tau, diag);
          out[m - 1] = r[m - 1];
          for (std::size_t t = m - 1; t-- > 0;) {
            out[t] = tv_or(r[t], tv_and(l[t], out[t + 1]));
          }
        }
        return out;
      },
      f.node);
}

bool coerce_top(TruthValue v, const Formula& f) {
  if (v != TruthValue::Undefined) return v == TruthValue::True;
  return std::holds_alternative<FAlways>(f.node);
}

}  // namespace

std::optional<Rat> eval_expr(const Expr& e, const Trace& tau, std::size_t t,
                             EvalDiagnostics* diag) {
  return eval_expr_at(e, tau, t, 0, diag);
}

TruthValue eval_formula(const Formula& f, const Trace& tau, std::size_t t,
                        EvalDiagnostics* diag) {
  return eval_all(f, tau, diag)[t];
}

bool trace_satisfies(const Formula& f, const Trace& tau, EvalDiagnostics* diag) {
  return coerce_top(eval_formula(f, tau, 0, diag), f);
}

SatisfactionResult satisfies(const Trace& tau, const Contract& c) {
  SatisfactionResult res;
  bool a_holds = trace_satisfies(*c.assumptions, tau, &res.diagnostics);
  bool g_holds = trace_satisfies(*c.guarantees, tau, &res.diagnostics);
  if (res.diagnostics.trace_unusable()) {
    std::string missing;
    for (const auto& v : res.diagnostics.missing_vars) {
      if (!missing.empty()) missing += ", ";
      missing += v;
    }
    throw MissingVariableError("trace does not provide variable(s): " + missing);
  }
  if (!a_holds) {
    res.value = Satisfaction::AViolated;
  } else if (!g_holds) {
    res.value = Satisfaction::GViolated;
  } else {
    res.value = Satisfaction::Verified;
  }
  return res;
}

bool statically_decidable(const Formula& f, const std::set<std::string>& scene_vars) {
  return std::visit(
      [&](const auto& x) -> bool {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, FAtom>) {
          if (contains_next_shift(*x.lhs) || contains_next_shift(*x.rhs)) return false;
          std::set<std::string> vars;
          collect_vars(*x.lhs, vars);
          collect_vars(*x.rhs, vars);
          for (const auto& v : vars) {
            if (!scene_vars.count(v)) return false;
          }
          return true;
        } else if constexpr (std::is_same_v<T, FBool>) {
          return true;
        } else if constexpr (std::is_same_v<T, FNext>) {
          // Strong next depends on the trace length even over constants.
          return false;
        } else if constexpr (std::is_same_v<T, FNot> || std::is_same_v<T, FAlways> ||
                             std::is_same_v<T, FEventually>) {
          return statically_decidable(*x.arg, scene_vars);
        } else {
          return statically_decidable(*x.lhs, scene_vars) &&
                 statically_decidable(*x.rhs, scene_vars);
        }
      },
      f.node);
}

namespace {

const FBool* as_bool(const FormulaPtr& f) { return std::get_if<FBool>(&f->node); }

}  // namespace

FormulaPtr simplify(const FormulaPtr& f) {
  return std::visit(
      [&](const auto& x) -> FormulaPtr {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, FAtom>) {
          const auto* lc = std::get_if<ExprConst>(&x.lhs->node);
          const auto* rc = std::get_if<ExprConst>(&x.rhs->node);
          if (lc && rc) {
            bool v = false;
            switch (x.op) {
              case CmpOp::Le: v = lc->value <= rc->value; break;
              case CmpOp::Lt: v = lc->value < rc->value; break;
              case CmpOp::Ge: v = lc->value >= rc->value; break;
              case CmpOp::Gt: v = lc->value > rc->value; break;
              case CmpOp::Eq: v = lc->value == rc->value; break;
              case CmpOp::Ne: v = lc->value != rc->value; break;
            }
            return f_bool(v);
          }
          return f;
        } else if constexpr (std::is_same_v<T, FBool>) {
          return f;
        } else if constexpr (std::is_same_v<T, FNot>) {
          FormulaPtr a = simplify(x.arg);
          if (const auto* b = as_bool(a)) return f_bool(!b->value);
          if (const auto* n = std::get_if<FNot>(&a->node)) return n->arg;
          return f_not(a);
        } else if constexpr (std::is_same_v<T, FAnd>) {
          FormulaPtr l = simplify(x.lhs);
          FormulaPtr r = simplify(x.rhs);
          if (const auto* b = as_bool(l)) return b->value ? r : f_bool(false);
          if (const auto* b = as_bool(r)) return b->value ? l : f_bool(false);
          return f_and(l, r);
        } else if constexpr (std::is_same_v<T, FOr>) {
          FormulaPtr l = simplify(x.lhs);
          FormulaPtr r = simplify(x.rhs);
          if (const auto* b = as_bool(l)) return b->value ? f_bool(true) : r;
          if (const auto* b = as_bool(r)) return b->value ? f_bool(true) : l;
          return f_or(l, r);
        } else if constexpr (std::is_same_v<T, FImplies>) {
          FormulaPtr l = simplify(x.lhs);
          FormulaPtr r = simplify(x.rhs);
          if (const auto* b = as_bool(l)) return b->value ? r : f_bool(true);
          if (const auto* b = as_bool(r)) {
            return b->value ? f_bool(true) : simplify(f_not(l));
          }
          return f_implies(l, r);
        } else if constexpr (std::is_same_v<T, FIff>) {
          FormulaPtr l = simplify(x.lhs);
          FormulaPtr r = simplify(x.rhs);
          if (const auto* b = as_bool(l)) return b->value ? r : simplify(f_not(r));
          if (const auto* b = as_bool(r)) return b->value ? l : simplify(f_not(l));
          return f_iff(l, r);
        } else if constexpr (std::is_same_v<T, FNext>) {
          // Strong next of a constant is not constant (false at the last
          // position), so nothing folds here.
          return f_next(simplify(x.arg));
        } else if constexpr (std::is_same_v<T, FAlways>) {
          FormulaPtr a = simplify(x.arg);
          if (const auto* b = as_bool(a)) return f_bool(b->value);
          return f_always(a);
        } else if constexpr (std::is_same_v<T, FEventually>) {
          FormulaPtr a = simplify(x.arg);
          if (const auto* b = as_bool(a)) return f_bool(b->value);
          return f_eventually(a);
        } else {
          FormulaPtr l = simplify(x.lhs);
          FormulaPtr r = simplify(x.rhs);
          if (const auto* b = as_bool(r)) return f_bool(b->value);
          if (const auto* b = as_bool(l); b && !b->value) return r;
          return f_until(l, r);
        }
      },
      f->node);
}

}  // namespace cpv
