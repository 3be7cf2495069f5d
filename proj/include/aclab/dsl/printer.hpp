#pragma once

#include <string>

#include "aclab/dsl/ast.hpp"

namespace aclab::dsl {

// Canonical text form: one policy block per def, four-space indent, one
// requirement per line, minimal parentheses. parse_text(pretty_print(d))
// is structurally equal to d for every valid doc.
std::string pretty_print(const PolicyDoc& doc);

std::string print_expr(const Expr& expr);

} // namespace aclab::dsl
