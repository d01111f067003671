#pragma once

#include "cpv/ast.hpp"

#include <stdexcept>
#include <string>
#include <vector>

namespace cpv {

struct ParseError : std::runtime_error {
  ParseError(std::string msg, int line, int column, std::vector<std::string> expected)
      : std::runtime_error(std::move(msg)), line(line), column(column),
        expected(std::move(expected)) {}
  int line;
  int column;
  std::vector<std::string> expected;
};

// Parses the concrete contract syntax:
//   always ((lead_dist) > (5))
//   always (self.speed <= (next self.speed))
//   (params['weather']) == (0)
// `next` applied to an expression is the value-level shift; applied to a
// formula it is the temporal operator. Throws ParseError with line/column
// and the expected-token set.
FormulaPtr parse_formula(const std::string& text);

// Parses a bare arithmetic expression (no comparison).
ExprPtr parse_expr(const std::string& text);

}  // namespace cpv
