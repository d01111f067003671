#include "cpv/ast.hpp"

#include <json.hpp>

#include <stdexcept>
#include <utility>

namespace cpv {

using nlohmann::ordered_json;

ExprPtr e_const(Rat v) { return std::make_shared<Expr>(Expr{ExprConst{std::move(v)}}); }
ExprPtr e_var(std::string path) { return std::make_shared<Expr>(Expr{ExprVar{std::move(path)}}); }
ExprPtr e_neg(ExprPtr a) { return std::make_shared<Expr>(Expr{ExprNeg{std::move(a)}}); }
ExprPtr e_bin(BinOp op, ExprPtr l, ExprPtr r) {
  return std::make_shared<Expr>(Expr{ExprBin{op, std::move(l), std::move(r)}});
}
ExprPtr e_call(FuncOp fn, std::vector<ExprPtr> args) {
  return std::make_shared<Expr>(Expr{ExprCall{fn, std::move(args)}});
}
ExprPtr e_next(ExprPtr a) { return std::make_shared<Expr>(Expr{ExprNextShift{std::move(a)}}); }

FormulaPtr f_atom(CmpOp op, ExprPtr l, ExprPtr r) {
  return std::make_shared<Formula>(Formula{FAtom{op, std::move(l), std::move(r)}});
}
FormulaPtr f_bool(bool v) { return std::make_shared<Formula>(Formula{FBool{v}}); }
FormulaPtr f_not(FormulaPtr a) { return std::make_shared<Formula>(Formula{FNot{std::move(a)}}); }
FormulaPtr f_and(FormulaPtr l, FormulaPtr r) {
  return std::make_shared<Formula>(Formula{FAnd{std::move(l), std::move(r)}});
}
FormulaPtr f_or(FormulaPtr l, FormulaPtr r) {
  return std::make_shared<Formula>(Formula{FOr{std::move(l), std::move(r)}});
}
FormulaPtr f_implies(FormulaPtr l, FormulaPtr r) {
  return std::make_shared<Formula>(Formula{FImplies{std::move(l), std::move(r)}});
}
FormulaPtr f_iff(FormulaPtr l, FormulaPtr r) {
  return std::make_shared<Formula>(Formula{FIff{std::move(l), std::move(r)}});
}
FormulaPtr f_next(FormulaPtr a) { return std::make_shared<Formula>(Formula{FNext{std::move(a)}}); }
FormulaPtr f_always(FormulaPtr a) {
  return std::make_shared<Formula>(Formula{FAlways{std::move(a)}});
}
FormulaPtr f_eventually(FormulaPtr a) {
  return std::make_shared<Formula>(Formula{FEventually{std::move(a)}});
}
FormulaPtr f_until(FormulaPtr l, FormulaPtr r) {
  return std::make_shared<Formula>(Formula{FUntil{std::move(l), std::move(r)}});
}

bool expr_equal(const Expr& a, const Expr& b) {
  if (a.node.index() != b.node.index()) return false;
  return std::visit(
      [&](const auto& x) -> bool {
        using T = std::decay_t<decltype(x)>;
        const T& y = std::get<T>(b.node);
        if constexpr (std::is_same_v<T, ExprConst>) {
          return x.value == y.value;
        } else if constexpr (std::is_same_v<T, ExprVar>) {
          return x.path == y.path;
        } else if constexpr (std::is_same_v<T, ExprNeg>) {
          return expr_equal(*x.arg, *y.arg);
        } else if constexpr (std::is_same_v<T, ExprBin>) {
          return x.op == y.op && expr_equal(*x.lhs, *y.lhs) && expr_equal(*x.rhs, *y.rhs);
        } else if constexpr (std::is_same_v<T, ExprCall>) {
          if (x.fn != y.fn || x.args.size() != y.args.size()) return false;
          for (std::size_t i = 0; i < x.args.size(); ++i) {
            if (!expr_equal(*x.args[i], *y.args[i])) return false;
          }
          return true;
        } else {
          return expr_equal(*x.arg, *std::get<ExprNextShift>(b.node).arg);
        }
      },
      a.node);
}

bool formula_equal(const Formula& a, const Formula& b) {
  if (a.node.index() != b.node.index()) return false;
  return std::visit(
      [&](const auto& x) -> bool {
        using T = std::decay_t<decltype(x)>;
        const T& y = std::get<T>(b.node);
        if constexpr (std::is_same_v<T, FAtom>) {
          return x.op == y.op && expr_equal(*x.lhs, *y.lhs) && expr_equal(*x.rhs, *y.rhs);
        } else if constexpr (std::is_same_v<T, FBool>) {
          return x.value == y.value;
        } else if constexpr (std::is_same_v<T, FNot> || std::is_same_v<T, FNext> ||
                             std::is_same_v<T, FAlways> || std::is_same_v<T, FEventually>) {
          return formula_equal(*x.arg, *y.arg);
        } else {
          return formula_equal(*x.lhs, *y.lhs) && formula_equal(*x.rhs, *y.rhs);
        }
      },
      a.node);
}

void collect_vars(const Expr& e, std::set<std::string>& out) {
  std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, ExprVar>) {
          out.insert(x.path);
        } else if constexpr (std::is_same_v<T, ExprNeg> || std::is_same_v<T, ExprNextShift>) {
          collect_vars(*x.arg, out);
        } else if constexpr (std::is_same_v<T, ExprBin>) {
          collect_vars(*x.lhs, out);
          collect_vars(*x.rhs, out);
        } else if constexpr (std::is_same_v<T, ExprCall>) {
          for (const auto& a : x.args) collect_vars(*a, out);
        }
      },
      e.node);
}

void collect_vars(const Formula& f, std::set<std::string>& out) {
  std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, FAtom>) {
          collect_vars(*x.lhs, out);
          collect_vars(*x.rhs, out);
        } else if constexpr (std::is_same_v<T, FNot> || std::is_same_v<T, FNext> ||
                             std::is_same_v<T, FAlways> || std::is_same_v<T, FEventually>) {
          collect_vars(*x.arg, out);
        } else if constexpr (!std::is_same_v<T, FBool>) {
          collect_vars(*x.lhs, out);
          collect_vars(*x.rhs, out);
        }
      },
      f.node);
}

std::set<std::string> formula_vars(const Formula& f) {
  std::set<std::string> out;
  collect_vars(f, out);
  return out;
}

bool contains_next_shift(const Expr& e) {
  return std::visit(
      [&](const auto& x) -> bool {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, ExprNextShift>) {
          return true;
        } else if constexpr (std::is_same_v<T, ExprNeg>) {
          return contains_next_shift(*x.arg);
        } else if constexpr (std::is_same_v<T, ExprBin>) {
          return contains_next_shift(*x.lhs) || contains_next_shift(*x.rhs);
        } else if constexpr (std::is_same_v<T, ExprCall>) {
          for (const auto& a : x.args) {
            if (contains_next_shift(*a)) return true;
          }
          return false;
        } else {
          return false;
        }
      },
      e.node);
}

std::vector<FormulaPtr> top_conjuncts(const FormulaPtr& f) {
  std::vector<FormulaPtr> out;
  if (const auto* a = std::get_if<FAnd>(&f->node)) {
    auto l = top_conjuncts(a->lhs);
    auto r = top_conjuncts(a->rhs);
    out.insert(out.end(), l.begin(), l.end());
    out.insert(out.end(), r.begin(), r.end());
  } else {
    out.push_back(f);
  }
  return out;
}

Contract Contract::make(std::string name, std::string subject, FormulaPtr a, FormulaPtr g) {
  Contract c;
  c.name = std::move(name);
  c.subject = std::move(subject);
  c.assumptions = std::move(a);
  c.guarantees = std::move(g);
  collect_vars(*c.assumptions, c.signature);
  collect_vars(*c.guarantees, c.signature);
  return c;
}

bool contract_equal(const Contract& a, const Contract& b) {
  return formula_equal(*a.assumptions, *b.assumptions) &&
         formula_equal(*a.guarantees, *b.guarantees);
}

std::string stable_hash_hex(const std::string& bytes) {
  // FNV-1a, 64 bit. Identification only, not cryptographic.
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return std::string(buf);
}

std::string contract_hash(const Contract& c) {
  return stable_hash_hex(formula_to_json(*c.assumptions) + "|" +
                         formula_to_json(*c.guarantees));
}

// ---- JSON ----

namespace {

const char* bin_name(BinOp op) {
  switch (op) {
    case BinOp::Add: return "+";
    case BinOp::Sub: return "-";
    case BinOp::Mul: return "*";
    case BinOp::Div: return "/";
  }
  return "?";
}

const char* func_name(FuncOp fn) {
  switch (fn) {
    case FuncOp::Min: return "min";
    case FuncOp::Max: return "max";
    case FuncOp::Floor: return "floor";
    case FuncOp::Ceil: return "ceil";
    case FuncOp::Abs: return "abs";
  }
  return "?";
}

const char* cmp_name(CmpOp op) {
  switch (op) {
    case CmpOp::Le: return "<=";
    case CmpOp::Lt: return "<";
    case CmpOp::Ge: return ">=";
    case CmpOp::Gt: return ">";
    case CmpOp::Eq: return "==";
    case CmpOp::Ne: return "!=";
  }
  return "?";
}

BinOp bin_from_name(const std::string& s) {
  if (s == "+") return BinOp::Add;
  if (s == "-") return BinOp::Sub;
  if (s == "*") return BinOp::Mul;
  if (s == "/") return BinOp::Div;
  throw std::invalid_argument("unknown binary op: " + s);
}

FuncOp func_from_name(const std::string& s) {
  if (s == "min") return FuncOp::Min;
  if (s == "max") return FuncOp::Max;
  if (s == "floor") return FuncOp::Floor;
  if (s == "ceil") return FuncOp::Ceil;
  if (s == "abs") return FuncOp::Abs;
  throw std::invalid_argument("unknown function: " + s);
}

CmpOp cmp_from_name(const std::string& s) {
  if (s == "<=") return CmpOp::Le;
  if (s == "<") return CmpOp::Lt;
  if (s == ">=") return CmpOp::Ge;
  if (s == ">") return CmpOp::Gt;
  if (s == "==") return CmpOp::Eq;
  if (s == "!=") return CmpOp::Ne;
  throw std::invalid_argument("unknown comparison: " + s);
}

ordered_json expr_json(const Expr& e) {
  return std::visit(
      [&](const auto& x) -> ordered_json {
        using T = std::decay_t<decltype(x)>;
        ordered_json j;
        if constexpr (std::is_same_v<T, ExprConst>) {
          j["k"] = "const";
          j["v"] = rat_to_string(x.value);
        } else if constexpr (std::is_same_v<T, ExprVar>) {
          j["k"] = "var";
          j["path"] = x.path;
        } else if constexpr (std::is_same_v<T, ExprNeg>) {
          j["k"] = "neg";
          j["arg"] = expr_json(*x.arg);
        } else if constexpr (std::is_same_v<T, ExprBin>) {
          j["k"] = "bin";
          j["op"] = bin_name(x.op);
          j["lhs"] = expr_json(*x.lhs);
          j["rhs"] = expr_json(*x.rhs);
        } else if constexpr (std::is_same_v<T, ExprCall>) {
          j["k"] = "call";
          j["fn"] = func_name(x.fn);
          j["args"] = ordered_json::array();
          for (const auto& a : x.args) j["args"].push_back(expr_json(*a));
        } else {
          j["k"] = "next";
          j["arg"] = expr_json(*x.arg);
        }
        return j;
      },
      e.node);
}

ordered_json formula_json(const Formula& f) {
  return std::visit(
      [&](const auto& x) -> ordered_json {
        using T = std::decay_t<decltype(x)>;
        ordered_json j;
        if constexpr (std::is_same_v<T, FAtom>) {
          j["k"] = "atom";
          j["op"] = cmp_name(x.op);
          j["lhs"] = expr_json(*x.lhs);
          j["rhs"] = expr_json(*x.rhs);
        } else if constexpr (std::is_same_v<T, FBool>) {
          j["k"] = "bool";
          j["v"] = x.value;
        } else if constexpr (std::is_same_v<T, FNot>) {
          j["k"] = "not";
          j["arg"] = formula_json(*x.arg);
        } else if constexpr (std::is_same_v<T, FAnd>) {
          j["k"] = "and";
          j["lhs"] = formula_json(*x.lhs);
          j["rhs"] = formula_json(*x.rhs);
        } else if constexpr (std::is_same_v<T, FOr>) {
          j["k"] = "or";
          j["lhs"] = formula_json(*x.lhs);
          j["rhs"] = formula_json(*x.rhs);
        } else if constexpr (std::is_same_v<T, FImplies>) {
          j["k"] = "implies";
          j["lhs"] = formula_json(*x.lhs);
          j["rhs"] = formula_json(*x.rhs);
        } else if constexpr (std::is_same_v<T, FIff>) {
          j["k"] = "iff";
          j["lhs"] = formula_json(*x.lhs);
          j["rhs"] = formula_json(*x.rhs);
        } else if constexpr (std::is_same_v<T, FNext>) {
          j["k"] = "X";
          j["arg"] = formula_json(*x.arg);
        } else if constexpr (std::is_same_v<T, FAlways>) {
          j["k"] = "always";
          j["arg"] = formula_json(*x.arg);
        } else if constexpr (std::is_same_v<T, FEventually>) {
          j["k"] = "eventually";
          j["arg"] = formula_json(*x.arg);
        } else {
          j["k"] = "until";
          j["lhs"] = formula_json(*x.lhs);
          j["rhs"] = formula_json(*x.rhs);
        }
        return j;
      },
      f.node);
}

ExprPtr expr_from_json(const ordered_json& j);

std::vector<ExprPtr> args_from_json(const ordered_json& j) {
  std::vector<ExprPtr> out;
  for (const auto& a : j) out.push_back(expr_from_json(a));
  return out;
}

ExprPtr expr_from_json(const ordered_json& j) {
  const std::string k = j.at("k").get<std::string>();
  if (k == "const") {
    auto v = rat_from_string(j.at("v").get<std::string>());
    if (!v) throw std::invalid_argument("bad rational literal in expr json");
    return e_const(*v);
  }
  if (k == "var") return e_var(j.at("path").get<std::string>());
  if (k == "neg") return e_neg(expr_from_json(j.at("arg")));
  if (k == "bin") {
    return e_bin(bin_from_name(j.at("op").get<std::string>()), expr_from_json(j.at("lhs")),
                 expr_from_json(j.at("rhs")));
  }
  if (k == "call") {
    return e_call(func_from_name(j.at("fn").get<std::string>()), args_from_json(j.at("args")));
  }
  if (k == "next") return e_next(expr_from_json(j.at("arg")));
  throw std::invalid_argument("unknown expr node kind: " + k);
}

FormulaPtr formula_from_json(const ordered_json& j) {
  const std::string k = j.at("k").get<std::string>();
  if (k == "atom") {
    return f_atom(cmp_from_name(j.at("op").get<std::string>()), expr_from_json(j.at("lhs")),
                  expr_from_json(j.at("rhs")));
  }
  if (k == "bool") return f_bool(j.at("v").get<bool>());
  if (k == "not") return f_not(formula_from_json(j.at("arg")));
  if (k == "and") return f_and(formula_from_json(j.at("lhs")), formula_from_json(j.at("rhs")));
  if (k == "or") return f_or(formula_from_json(j.at("lhs")), formula_from_json(j.at("rhs")));
  if (k == "implies") {
    return f_implies(formula_from_json(j.at("lhs")), formula_from_json(j.at("rhs")));
  }
  if (k == "iff") return f_iff(formula_from_json(j.at("lhs")), formula_from_json(j.at("rhs")));
  if (k == "X") return f_next(formula_from_json(j.at("arg")));
  if (k == "always") return f_always(formula_from_json(j.at("arg")));
  if (k == "eventually") return f_eventually(formula_from_json(j.at("arg")));
  if (k == "until") return f_until(formula_from_json(j.at("lhs")), formula_from_json(j.at("rhs")));
  throw std::invalid_argument("unknown formula node kind: " + k);
}

}  // namespace

std::string expr_to_json(const Expr& e) { return expr_json(e).dump(); }
std::string formula_to_json(const Formula& f) { return formula_json(f).dump(); }

ExprPtr expr_from_json_text(const std::string& text) {
  return expr_from_json(ordered_json::parse(text));
}

FormulaPtr formula_from_json_text(const std::string& text) {
  return formula_from_json(ordered_json::parse(text));
}

}  // namespace cpv
