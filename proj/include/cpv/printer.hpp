#pragma once

#include "cpv/ast.hpp"

#include <string>

namespace cpv {

// Fully parenthesized concrete syntax, e.g. `always ((lead_dist) > (5))`.
// parse_formula(render_formula(f)) reconstructs f node-for-node, provided f
// only contains non-negative constants (the parser expresses negation as a
// unary operator, never inside a literal).
std::string render_formula(const Formula& f);
std::string render_expr(const Expr& e);

}  // namespace cpv
