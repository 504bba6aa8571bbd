#pragma once

#include <string>

#include "cfkit/ast.hpp"

namespace cfkit {

// Parses one function definition in the surface grammar (docs/grammar.md is
// the normative reference). Whitespace-only lines are ignored everywhere;
// decorative `import ...` lines before the `def` are skipped.
//
// Beyond the grammar, parsing enforces:
//   - exactly one `return`, as the final top-level statement;
//   - every variable read is a parameter or definitely assigned on every
//     path reaching the read (conservative: loop bodies may run zero times);
//   - no chained comparisons.
// Violations throw ParseError with a 1-based line and column.
FunctionAst parse_function(const std::string& source);

}  // namespace cfkit
