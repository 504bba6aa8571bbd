#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "cfkit/errors.hpp"

namespace cfkit {

using Value = std::int64_t;

enum class BinOp { Add, Sub, Mul, FloorDiv, Mod, Pow };
enum class CmpOp { Eq, Ne, Lt, Le, Gt, Ge };
enum class BoolOp { And, Or };
enum class UnOp { Neg, Abs };

const char* op_symbol(BinOp op);
const char* op_symbol(CmpOp op);
const char* op_symbol(BoolOp op);

struct Expr;
// Nodes are logically immutable once parse_function returns; shared_ptr makes
// ASTs cheap to copy around candidate/instance values.
using ExprPtr = std::shared_ptr<Expr>;

struct IntLit {
  Value value;
};

struct Name {
  std::string id;
  int slot = -1;  // index into FunctionAst::locals, filled by the resolver
};

struct Unary {
  UnOp op;
  ExprPtr operand;
};

struct Binary {
  BinOp op;
  ExprPtr lhs;
  ExprPtr rhs;
};

// Single comparison; chained comparisons (a < b < c) are a parse error.
struct Compare {
  CmpOp op;
  ExprPtr lhs;
  ExprPtr rhs;
};

// Short-circuit and/or with operand-value semantics: `a and b` yields a when a
// is falsy, else b; `a or b` yields a when truthy, else b.
struct Bool {
  BoolOp op;
  ExprPtr lhs;
  ExprPtr rhs;
};

struct Expr {
  std::variant<IntLit, Name, Unary, Binary, Compare, Bool> node;
  int line = 0;
  int col = 0;
};

struct Stmt;
using StmtPtr = std::shared_ptr<Stmt>;
using Block = std::vector<StmtPtr>;

// Covers plain and chained assignment: targets.size() >= 1, all targets take
// the same value (`result = result = x * r1` has two targets).
struct Assign {
  std::vector<Name> targets;
  ExprPtr value;
};

struct AugAssign {
  Name target;
  BinOp op;
  ExprPtr value;
};

struct IfArm {
  ExprPtr cond;
  Block body;
};

// arms[0] is the `if`, the rest are `elif`s; orelse may be empty.
struct If {
  std::vector<IfArm> arms;
  Block orelse;
};

struct While {
  ExprPtr cond;
  Block body;
};

// `for var in range(count):`, iterating 0..count-1; count <= 0 means no
// iterations. The loop variable is a normal local.
struct ForRange {
  Name var;
  ExprPtr count;
  Block body;
};

struct Pass {};

struct Return {
  ExprPtr value;
};

struct Stmt {
  std::variant<Assign, AugAssign, If, While, ForRange, Pass, Return> node;
  int line = 0;
  int col = 0;
};

struct FunctionAst {
  std::string name;
  std::vector<std::string> params;  // params[0] is the visible input
  Block body;
  // All variables: params first, then others in first-assignment order.
  // Name::slot indexes into this.
  std::vector<std::string> locals;
  int statement_count = 0;  // total Stmt nodes, nested included
  int nesting_depth = 0;    // max compound-statement nesting; flat body = 0
};

// Structural equality; ignores source positions, compares identifiers.
bool equal(const Expr& a, const Expr& b);
bool equal(const Stmt& a, const Stmt& b);
bool equal(const FunctionAst& a, const FunctionAst& b);

// All parameters after the visible input, in declaration order.
// Throws MalformedSignature when the function has fewer than 2 parameters.
std::vector<std::string> free_latents(const FunctionAst& f);

}  // namespace cfkit
