#pragma once

#include <string>

#include "ivlkit/stmt.hpp"

namespace ivl {

// Parses the textual .ivl format. Throws ParseError (src/lexer.hpp) with
// line/column on malformed input.
Program parse_ivl(const std::string& source);

// Pretty-printer; parse_ivl(print_ivl(p)) is structurally equal to p.
std::string print_ivl(const Program& program);
std::string print_stmt_block(const StmtPtr& stmt, int indent);

}  // namespace ivl
