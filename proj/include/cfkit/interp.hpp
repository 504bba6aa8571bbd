#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "cfkit/ast.hpp"

namespace cfkit {

struct EvalLimits {
  // Statement executions allowed; loop iterations re-charge their body.
  std::int64_t fuel = 1'000'000;
  // Max |value| for any intermediate. The default delegates to checked
  // 64-bit arithmetic (so the effective cap is 2^63 - 1).
  Value magnitude_cap = INT64_MAX;
};

// Exact integer semantics. Division and remainder are floored: the quotient
// rounds toward negative infinity and the remainder takes the divisor's sign,
// matching the surface language the prompts display: (-7) // 3 == -3,
// (-7) % 3 == 2. `**` requires a non-negative exponent. Comparisons yield
// 0/1; `and`/`or` short-circuit and yield an operand value.
//
// Throws FuelExhausted, ArithmeticError (zero divisor, overflow, cap),
// NegativeExponent, UnboundVariable, MissingReturn, EvalError (bad args).
Value evaluate(const FunctionAst& f, const std::map<std::string, Value>& args,
               const EvalLimits& limits = {});

// Same, with arguments given positionally in parameter order (the hot path
// for abduction enumeration).
Value evaluate_params(const FunctionAst& f, const std::vector<Value>& args,
                      const EvalLimits& limits = {});

// Execution-trace tag kinds (tag = kind << 8 | detail). Value-bearing
// statements carry the coarse class of their right-hand side in the detail
// byte: 'v' literal or name, 'u' negation, 'b' abs, one of "+-*/%^" for a binary node by
// operator ('/' floor division, '^' power), 'c' comparison or boolean.
// kFlowArmTaken's detail is the zero-based index of the branch arm taken.
// Compound statements that a `return` exits early never emit their close tag.
enum FlowTagKind : std::uint16_t {
  kFlowAssign = 1,
  kFlowChained,
  kFlowAug,
  kFlowReturn,
  kFlowIfOpen,
  kFlowArmTaken,
  kFlowElseTaken,
  kFlowIfClose,
  kFlowWhileOpen,
  kFlowWhileClose,
  kFlowForOpen,
  kFlowForClose,
  kFlowPass,
  kFlowEvalError,
  kFlowTraceCap,
};

constexpr std::uint16_t flow_tag(FlowTagKind kind, unsigned char detail = 0) {
  return static_cast<std::uint16_t>((kind << 8) | detail);
}

// Runs f on positional args and records the execution path as flow tags, one
// per statement execution, so loop bodies repeat per iteration. Evaluation
// faults end the trace with kFlowEvalError instead of throwing; a trace that
// would exceed max_tags stops early and ends with kFlowTraceCap. The computed
// return value is discarded.
std::vector<std::uint16_t> execution_trace(const FunctionAst& f, const std::vector<Value>& args,
                                           const EvalLimits& limits = {},
                                           std::size_t max_tags = 96);

}  // namespace cfkit
