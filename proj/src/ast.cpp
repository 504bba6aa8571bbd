#include "cfkit/ast.hpp"

namespace cfkit {

const char* op_symbol(BinOp op) {
  switch (op) {
    case BinOp::Add: return "+";
    case BinOp::Sub: return "-";
    case BinOp::Mul: return "*";
    case BinOp::FloorDiv: return "//";
    case BinOp::Mod: return "%";
    case BinOp::Pow: return "**";
  }
  return "?";
}

const char* op_symbol(CmpOp op) {
  switch (op) {
    case CmpOp::Eq: return "==";
    case CmpOp::Ne: return "!=";
    case CmpOp::Lt: return "<";
    case CmpOp::Le: return "<=";
    case CmpOp::Gt: return ">";
    case CmpOp::Ge: return ">=";
  }
  return "?";
}

const char* op_symbol(BoolOp op) {
  return op == BoolOp::And ? "and" : "or";
}

namespace {

bool equal_block(const Block& a, const Block& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!equal(*a[i], *b[i])) return false;
  }
  return true;
}

}  // namespace

bool equal(const Expr& a, const Expr& b) {
  if (a.node.index() != b.node.index()) return false;
  return std::visit(
      [&](const auto& an) {
        using T = std::decay_t<decltype(an)>;
        const auto& bn = std::get<T>(b.node);
        if constexpr (std::is_same_v<T, IntLit>) {
          return an.value == bn.value;
        } else if constexpr (std::is_same_v<T, Name>) {
          return an.id == bn.id;
        } else if constexpr (std::is_same_v<T, Unary>) {
          return an.op == bn.op && equal(*an.operand, *bn.operand);
        } else if constexpr (std::is_same_v<T, Binary>) {
          return an.op == bn.op && equal(*an.lhs, *bn.lhs) && equal(*an.rhs, *bn.rhs);
        } else if constexpr (std::is_same_v<T, Compare>) {
          return an.op == bn.op && equal(*an.lhs, *bn.lhs) && equal(*an.rhs, *bn.rhs);
        } else {
          static_assert(std::is_same_v<T, Bool>);
          return an.op == bn.op && equal(*an.lhs, *bn.lhs) && equal(*an.rhs, *bn.rhs);
        }
      },
      a.node);
}

bool equal(const Stmt& a, const Stmt& b) {
  if (a.node.index() != b.node.index()) return false;
  return std::visit(
      [&](const auto& an) {
        using T = std::decay_t<decltype(an)>;
        const auto& bn = std::get<T>(b.node);
        if constexpr (std::is_same_v<T, Assign>) {
          if (an.targets.size() != bn.targets.size()) return false;
          for (std::size_t i = 0; i < an.targets.size(); ++i) {
            if (an.targets[i].id != bn.targets[i].id) return false;
          }
          return equal(*an.value, *bn.value);
        } else if constexpr (std::is_same_v<T, AugAssign>) {
          return an.target.id == bn.target.id && an.op == bn.op && equal(*an.value, *bn.value);
        } else if constexpr (std::is_same_v<T, If>) {
          if (an.arms.size() != bn.arms.size()) return false;
          for (std::size_t i = 0; i < an.arms.size(); ++i) {
            if (!equal(*an.arms[i].cond, *bn.arms[i].cond)) return false;
            if (!equal_block(an.arms[i].body, bn.arms[i].body)) return false;
          }
          return equal_block(an.orelse, bn.orelse);
        } else if constexpr (std::is_same_v<T, While>) {
          return equal(*an.cond, *bn.cond) && equal_block(an.body, bn.body);
        } else if constexpr (std::is_same_v<T, ForRange>) {
          return an.var.id == bn.var.id && equal(*an.count, *bn.count) &&
                 equal_block(an.body, bn.body);
        } else if constexpr (std::is_same_v<T, Pass>) {
          return true;
        } else {
          static_assert(std::is_same_v<T, Return>);
          return equal(*an.value, *bn.value);
        }
      },
      a.node);
}

bool equal(const FunctionAst& a, const FunctionAst& b) {
  return a.name == b.name && a.params == b.params && equal_block(a.body, b.body);
}

std::vector<std::string> free_latents(const FunctionAst& f) {
  if (f.params.size() < 2) {
    throw MalformedSignature("function " + f.name + " has " +
                             std::to_string(f.params.size()) +
                             " parameter(s); need a visible input plus at least one latent");
  }
  return {f.params.begin() + 1, f.params.end()};
}

}  // namespace cfkit
