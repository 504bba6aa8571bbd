#pragma once

#include <string>

#include "cfkit/ast.hpp"

namespace cfkit {

// Canonical source rendering: 4-space indents, single spaces around binary
// operators and '=', parentheses only where precedence requires them, no
// blank lines, one trailing newline. parse_function(render_source(f)) is
// structurally equal to f.
std::string render_source(const FunctionAst& f);

// Expression rendering with the same conventions (used in docs and tests).
std::string render_expr(const Expr& e);

}  // namespace cfkit
