#include "cfkit/printer.hpp"

namespace cfkit {
namespace {

// Binding strengths, loosest to tightest. Atoms rank above Pow so they never
// get parenthesized.
enum Prec { kOr = 1, kAnd = 2, kCmp = 3, kAdd = 4, kMul = 5, kUnary = 6, kPow = 7, kAtom = 8 };

int precedence(const Expr& e) {
  return std::visit(
      [](const auto& n) -> int {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, IntLit> || std::is_same_v<T, Name>) return kAtom;
        else if constexpr (std::is_same_v<T, Unary>) return n.op == UnOp::Abs ? kAtom : kUnary;
        else if constexpr (std::is_same_v<T, Binary>) {
          switch (n.op) {
            case BinOp::Add: case BinOp::Sub: return kAdd;
            case BinOp::Mul: case BinOp::FloorDiv: case BinOp::Mod: return kMul;
            case BinOp::Pow: return kPow;
          }
          return kAtom;
        } else if constexpr (std::is_same_v<T, Compare>) return kCmp;
        else return std::is_same_v<T, Bool> && n.op == BoolOp::And ? kAnd : kOr;
      },
      e.node);
}

void emit(const Expr& e, std::string& out);

void child(const Expr& c, int min_prec, std::string& out) {
  if (precedence(c) < min_prec) {
    out += '(';
    emit(c, out);
    out += ')';
  } else {
    emit(c, out);
  }
}

void emit(const Expr& e, std::string& out) {
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, IntLit>) {
          out += std::to_string(n.value);
        } else if constexpr (std::is_same_v<T, Name>) {
          out += n.id;
        } else if constexpr (std::is_same_v<T, Unary>) {
          if (n.op == UnOp::Abs) {
            out += "abs(";
            emit(*n.operand, out);
            out += ')';
          } else {
            out += '-';
            child(*n.operand, kUnary, out);
          }
        } else if constexpr (std::is_same_v<T, Binary>) {
          int p = precedence(e);
          if (n.op == BinOp::Pow) {
            // Right-associative: the left child must outrank Pow, the right
            // child only needs to beat Unary so `x ** -2` stays unwrapped.
            child(*n.lhs, kAtom, out);
            out += " ** ";
            child(*n.rhs, kUnary, out);
          } else {
            child(*n.lhs, p, out);
            out += ' ';
            out += op_symbol(n.op);
            out += ' ';
            child(*n.rhs, p + 1, out);
          }
        } else if constexpr (std::is_same_v<T, Compare>) {
          child(*n.lhs, kCmp + 1, out);
          out += ' ';
          out += op_symbol(n.op);
          out += ' ';
          child(*n.rhs, kCmp + 1, out);
        } else {
          static_assert(std::is_same_v<T, Bool>);
          int p = precedence(e);
          child(*n.lhs, p, out);
          out += ' ';
          out += op_symbol(n.op);
          out += ' ';
          child(*n.rhs, p + 1, out);
        }
      },
      e.node);
}

void emit_block(const Block& b, int indent, std::string& out);

void emit_stmt(const Stmt& s, int indent, std::string& out) {
  std::string pad(4 * std::size_t(indent), ' ');
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Assign>) {
          out += pad;
          for (const auto& t : n.targets) {
            out += t.id;
            out += " = ";
          }
          emit(*n.value, out);
          out += '\n';
        } else if constexpr (std::is_same_v<T, AugAssign>) {
          out += pad;
          out += n.target.id;
          out += ' ';
          out += op_symbol(n.op);
          out += "= ";
          emit(*n.value, out);
          out += '\n';
        } else if constexpr (std::is_same_v<T, If>) {
          for (std::size_t i = 0; i < n.arms.size(); ++i) {
            out += pad;
            out += i == 0 ? "if " : "elif ";
            emit(*n.arms[i].cond, out);
            out += ":\n";
            emit_block(n.arms[i].body, indent + 1, out);
          }
          if (!n.orelse.empty()) {
            out += pad;
            out += "else:\n";
            emit_block(n.orelse, indent + 1, out);
          }
        } else if constexpr (std::is_same_v<T, While>) {
          out += pad;
          out += "while ";
          emit(*n.cond, out);
          out += ":\n";
          emit_block(n.body, indent + 1, out);
        } else if constexpr (std::is_same_v<T, ForRange>) {
          out += pad;
          out += "for ";
          out += n.var.id;
          out += " in range(";
          emit(*n.count, out);
          out += "):\n";
          emit_block(n.body, indent + 1, out);
        } else if constexpr (std::is_same_v<T, Pass>) {
          out += pad;
          out += "pass\n";
        } else {
          static_assert(std::is_same_v<T, Return>);
          out += pad;
          out += "return ";
          emit(*n.value, out);
          out += '\n';
        }
      },
      s.node);
}

void emit_block(const Block& b, int indent, std::string& out) {
  for (const auto& s : b) emit_stmt(*s, indent, out);
}

}  // namespace

std::string render_expr(const Expr& e) {
  std::string out;
  emit(e, out);
  return out;
}

std::string render_source(const FunctionAst& f) {
  std::string out = "def " + f.name + "(";
  for (std::size_t i = 0; i < f.params.size(); ++i) {
    if (i) out += ", ";
    out += f.params[i];
  }
  out += "):\n";
  emit_block(f.body, 1, out);
  return out;
}

}  // namespace cfkit
