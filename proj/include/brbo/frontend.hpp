#pragma once

#include "brbo/corelang.hpp"

#include <string>

namespace brbo {

struct ParseError : std::runtime_error {
  int line;
  int col;
  ParseError(std::string msg, int line_, int col_)
      : std::runtime_error(std::move(msg)), line(line_), col(col_) {}
};

// Text format:
//   program <ident>
//   inputs a, b            (omitted when there are none)
//   pre <expr>             (omitted when trivially true)
//   resources r1, r2
//   entry <loc>
//   edge <loc> -> <loc> : <cmd>
// Commands: skip | x := e | x := * | assume(e) | use r (e)
//         | ub!(r1, r2 <= e) | lb!(e <= r1, r2) | reset r
// Identifiers may contain '#' (e.g. #sb, ts#rep). '//' starts a comment.
Program parse_program(const std::string& text);
Program parse_program_file(const std::string& path);

// Standalone expression parser; used for predicate flags and tests.
ExprPtr parse_expr_string(const std::string& text);

std::string print_program(const Program& p);
std::string print_expr(const ExprPtr& e);
std::string print_cmd(const Cmd& c);

} // namespace brbo
