#include "cpv/printer.hpp"

namespace cpv {

namespace {

std::string wrap(const std::string& s) { return "(" + s + ")"; }

std::string expr_str(const Expr& e) {
  return std::visit(
      [&](const auto& x) -> std::string {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, ExprConst>) {
          if (x.value < 0) return "-" + wrap(rat_to_string(Rat(-x.value)));
          return rat_to_string(x.value);
        } else if constexpr (std::is_same_v<T, ExprVar>) {
          return x.path;
        } else if constexpr (std::is_same_v<T, ExprNeg>) {
          return "-" + wrap(expr_str(*x.arg));
        } else if constexpr (std::is_same_v<T, ExprBin>) {
          const char* op = x.op == BinOp::Add   ? " + "
                           : x.op == BinOp::Sub ? " - "
                           : x.op == BinOp::Mul ? " * "
                                                : " / ";
          return wrap(expr_str(*x.lhs)) + op + wrap(expr_str(*x.rhs));
        } else if constexpr (std::is_same_v<T, ExprCall>) {
          const char* fn = x.fn == FuncOp::Min     ? "min"
                           : x.fn == FuncOp::Max   ? "max"
                           : x.fn == FuncOp::Floor ? "floor"
                           : x.fn == FuncOp::Ceil  ? "ceil"
                                                   : "abs";
          std::string out = std::string(fn) + "(";
          for (std::size_t i = 0; i < x.args.size(); ++i) {
            if (i) out += ", ";
            out += wrap(expr_str(*x.args[i]));
          }
          return out + ")";
        } else {
          return "next " + wrap(expr_str(*std::get<ExprNextShift>(e.node).arg));
        }
      },
      e.node);
}

std::string formula_str(const Formula& f) {
  return std::visit(
      [&](const auto& x) -> std::string {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, FAtom>) {
          const char* op = x.op == CmpOp::Le   ? " <= "
                           : x.op == CmpOp::Lt ? " < "
                           : x.op == CmpOp::Ge ? " >= "
                           : x.op == CmpOp::Gt ? " > "
                           : x.op == CmpOp::Eq ? " == "
                                               : " != ";
          return wrap(expr_str(*x.lhs)) + op + wrap(expr_str(*x.rhs));
        } else if constexpr (std::is_same_v<T, FBool>) {
          return x.value ? "true" : "false";
        } else if constexpr (std::is_same_v<T, FNot>) {
          return "not " + wrap(formula_str(*x.arg));
        } else if constexpr (std::is_same_v<T, FAnd>) {
          return wrap(formula_str(*x.lhs)) + " and " + wrap(formula_str(*x.rhs));
        } else if constexpr (std::is_same_v<T, FOr>) {
          return wrap(formula_str(*x.lhs)) + " or " + wrap(formula_str(*x.rhs));
        } else if constexpr (std::is_same_v<T, FImplies>) {
          return wrap(formula_str(*x.lhs)) + " implies " + wrap(formula_str(*x.rhs));
        } else if constexpr (std::is_same_v<T, FIff>) {
          return wrap(formula_str(*x.lhs)) + " iff " + wrap(formula_str(*x.rhs));
        } else if constexpr (std::is_same_v<T, FNext>) {
          return "next " + wrap(formula_str(*x.arg));
        } else if constexpr (std::is_same_v<T, FAlways>) {
          return "always " + wrap(formula_str(*x.arg));
        } else if constexpr (std::is_same_v<T, FEventually>) {
          return "eventually " + wrap(formula_str(*x.arg));
        } else {
          return wrap(formula_str(*x.lhs)) + " until " + wrap(formula_str(*x.rhs));
        }
      },
      f.node);
}

}  // namespace

std::string render_formula(const Formula& f) { return formula_str(f); }
std::string render_expr(const Expr& e) { return expr_str(e); }

}  // namespace cpv
