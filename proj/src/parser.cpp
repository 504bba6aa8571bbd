#include "cfkit/parser.hpp"

#include <map>
#include <set>
#include <utility>

namespace cfkit {
namespace {

enum class Tok {
  Def, If, Elif, Else, While, For, In, Range, Pass, Return, And, Or, Abs,
  Ident, Number,
  LParen, RParen, Colon, Comma,
  Assign,     // =
  AugAssign,  // += -= *= //= %= **=
  Plus, Minus, Star, DblStar, DblSlash, Percent,
  EqEq, NotEq, Lt, Le, Gt, Ge,
  Newline, Indent, Dedent, End,
};

struct Token {
  Tok kind;
  std::string text;
  Value num = 0;
  BinOp aug_op = BinOp::Add;
  int line = 1;
  int col = 1;
};

const std::map<std::string, Tok, std::less<>> kKeywords = {
    {"def", Tok::Def},     {"if", Tok::If},       {"elif", Tok::Elif},
    {"else", Tok::Else},   {"while", Tok::While}, {"for", Tok::For},
    {"in", Tok::In},       {"range", Tok::Range}, {"pass", Tok::Pass},
    {"return", Tok::Return}, {"and", Tok::And},   {"or", Tok::Or},
    {"abs", Tok::Abs},
};

bool ident_start(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_'; }
bool ident_char(char c) { return ident_start(c) || (c >= '0' && c <= '9'); }

class Lexer {
 public:
  explicit Lexer(const std::string& source) : src_(source) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    std::vector<int> indents{0};
    bool seen_code = false;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= src_.size()) {
      std::size_t eol = src_.find('\n', pos);
      if (eol == std::string::npos) eol = src_.size();
      std::string_view line(src_.data() + pos, eol - pos);
      ++line_no;

      std::size_t i = 0;
      while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) {
        if (line[i] == '\t') throw ParseError(line_no, int(i) + 1, "tab in indentation");
        ++i;
      }
      bool blank = i == line.size();
      // Decorative preamble: import lines before any code.
      if (!blank && !seen_code && line.substr(i, 7) == "import " ) blank = true;
      if (!blank && !seen_code && line.substr(i) == "import") blank = true;
      if (!blank) {
        seen_code = true;
        int indent = int(i);
        if (indent > indents.back()) {
          indents.push_back(indent);
          out.push_back({Tok::Indent, "", 0, BinOp::Add, line_no, 1});
        } else {
          while (indent < indents.back()) {
            indents.pop_back();
            out.push_back({Tok::Dedent, "", 0, BinOp::Add, line_no, 1});
          }
          if (indent != indents.back()) {
            throw ParseError(line_no, indent + 1, "unindent does not match any outer level");
          }
        }
        lex_line(line, i, line_no, out);
        out.push_back({Tok::Newline, "", 0, BinOp::Add, line_no, int(line.size()) + 1});
      }
      if (eol == src_.size()) break;
      pos = eol + 1;
    }
    while (indents.back() > 0) {
      indents.pop_back();
      out.push_back({Tok::Dedent, "", 0, BinOp::Add, line_no + 1, 1});
    }
    out.push_back({Tok::End, "", 0, BinOp::Add, line_no + 1, 1});
    return out;
  }

 private:
  void lex_line(std::string_view line, std::size_t i, int line_no, std::vector<Token>& out) {
    while (i < line.size()) {
      char c = line[i];
      int col = int(i) + 1;
      if (c == ' ') { ++i; continue; }
      if (c == '\t') throw ParseError(line_no, col, "tab character");
      if (ident_start(c)) {
        std::size_t j = i + 1;
        while (j < line.size() && ident_char(line[j])) ++j;
        std::string word(line.substr(i, j - i));
        if (word == "import") throw ParseError(line_no, col, "import is only allowed before the function");
        auto kw = kKeywords.find(word);
        out.push_back({kw == kKeywords.end() ? Tok::Ident : kw->second, word, 0, BinOp::Add,
                       line_no, col});
        i = j;
        continue;
      }
      if (c >= '0' && c <= '9') {
        Value v = 0;
        std::size_t j = i;
        while (j < line.size() && line[j] >= '0' && line[j] <= '9') {
          Value digit = line[j] - '0';
          if (v > (INT64_MAX - digit) / 10) {
            throw ParseError(line_no, col, "integer literal too large");
          }
          v = v * 10 + digit;
          ++j;
        }
        if (j < line.size() && ident_start(line[j])) {
          throw ParseError(line_no, int(j) + 1, "identifier cannot start with a digit");
        }
        out.push_back({Tok::Number, std::string(line.substr(i, j - i)), v, BinOp::Add, line_no, col});
        i = j;
        continue;
      }
      auto emit = [&](Tok k, int len) {
        out.push_back({k, std::string(line.substr(i, len)), 0, BinOp::Add, line_no, col});
        i += len;
      };
      auto emit_aug = [&](BinOp op, int len) {
        out.push_back({Tok::AugAssign, std::string(line.substr(i, len)), 0, op, line_no, col});
        i += len;
      };
      auto rest = line.substr(i);
      if (rest.starts_with("**=")) { emit_aug(BinOp::Pow, 3); continue; }
      if (rest.starts_with("//=")) { emit_aug(BinOp::FloorDiv, 3); continue; }
      if (rest.starts_with("**")) { emit(Tok::DblStar, 2); continue; }
      if (rest.starts_with("//")) { emit(Tok::DblSlash, 2); continue; }
      if (rest.starts_with("==")) { emit(Tok::EqEq, 2); continue; }
      if (rest.starts_with("!=")) { emit(Tok::NotEq, 2); continue; }
      if (rest.starts_with("<=")) { emit(Tok::Le, 2); continue; }
      if (rest.starts_with(">=")) { emit(Tok::Ge, 2); continue; }
      if (rest.starts_with("+=")) { emit_aug(BinOp::Add, 2); continue; }
      if (rest.starts_with("-=")) { emit_aug(BinOp::Sub, 2); continue; }
      if (rest.starts_with("*=")) { emit_aug(BinOp::Mul, 2); continue; }
      if (rest.starts_with("%=")) { emit_aug(BinOp::Mod, 2); continue; }
      switch (c) {
        case '(': emit(Tok::LParen, 1); continue;
        case ')': emit(Tok::RParen, 1); continue;
        case ':': emit(Tok::Colon, 1); continue;
        case ',': emit(Tok::Comma, 1); continue;
        case '=': emit(Tok::Assign, 1); continue;
        case '+': emit(Tok::Plus, 1); continue;
        case '-': emit(Tok::Minus, 1); continue;
        case '*': emit(Tok::Star, 1); continue;
        case '%': emit(Tok::Percent, 1); continue;
        case '<': emit(Tok::Lt, 1); continue;
        case '>': emit(Tok::Gt, 1); continue;
        default:
          throw ParseError(line_no, col, std::string("unexpected character '") + c + "'");
      }
    }
  }

  const std::string& src_;
};

class Parser {
 public:
  explicit Parser(std::vector<Token> tokens) : toks_(std::move(tokens)) {}

  FunctionAst run() {
    FunctionAst f;
    expect(Tok::Def, "expected 'def'");
    f.name = expect(Tok::Ident, "expected function name").text;
    expect(Tok::LParen, "expected '('");
    f.params.push_back(expect(Tok::Ident, "expected parameter name").text);
    while (at(Tok::Comma)) {
      advance();
      f.params.push_back(expect(Tok::Ident, "expected parameter name").text);
    }
    expect(Tok::RParen, "expected ')'");
    expect(Tok::Colon, "expected ':'");
    expect(Tok::Newline, "expected end of line");
    expect(Tok::Indent, "expected an indented function body");
    while (!at(Tok::Dedent)) f.body.push_back(statement());
    advance();
    expect(Tok::End, "expected end of input after the function");
    for (std::size_t i = 0; i < f.params.size(); ++i) {
      for (std::size_t j = i + 1; j < f.params.size(); ++j) {
        if (f.params[i] == f.params[j]) {
          throw ParseError(1, 1, "duplicate parameter '" + f.params[i] + "'");
        }
      }
    }
    return f;
  }

 private:
  const Token& peek(int ahead = 0) const {
    std::size_t i = pos_ + ahead;
    return i < toks_.size() ? toks_[i] : toks_.back();
  }
  bool at(Tok k) const { return peek().kind == k; }
  const Token& advance() { return toks_[pos_++]; }
  const Token& expect(Tok k, const char* msg) {
    if (!at(k)) throw ParseError(peek().line, peek().col, msg);
    return advance();
  }

  StmtPtr statement() {
    const Token& t = peek();
    switch (t.kind) {
      case Tok::Pass: {
        advance();
        expect(Tok::Newline, "expected end of line after 'pass'");
        return make_stmt(Pass{}, t);
      }
      case Tok::Return: {
        advance();
        ExprPtr v = expression();
        expect(Tok::Newline, "expected end of line after return expression");
        return make_stmt(Return{std::move(v)}, t);
      }
      case Tok::If: return if_statement();
      case Tok::While: {
        advance();
        ExprPtr cond = expression();
        return make_stmt(While{std::move(cond), block()}, t);
      }
      case Tok::For: {
        advance();
        Name var{expect(Tok::Ident, "expected loop variable").text, -1};
        expect(Tok::In, "expected 'in'");
        expect(Tok::Range, "expected 'range'");
        expect(Tok::LParen, "expected '('");
        ExprPtr count = expression();
        expect(Tok::RParen, "expected ')'");
        return make_stmt(ForRange{std::move(var), std::move(count), block()}, t);
      }
      case Tok::Ident: return assignment();
      default:
        throw ParseError(t.line, t.col, "expected a statement");
    }
  }

  StmtPtr if_statement() {
    const Token& t = peek();
    If node;
    advance();
    node.arms.push_back({expression(), block()});
    while (at(Tok::Elif)) {
      advance();
      node.arms.push_back({expression(), block()});
    }
    if (at(Tok::Else)) {
      advance();
      node.orelse = block();
    }
    return make_stmt(std::move(node), t);
  }

  StmtPtr assignment() {
    const Token& first = peek();
    if (peek(1).kind == Tok::AugAssign) {
      Name target{advance().text, -1};
      BinOp op = advance().aug_op;
      ExprPtr v = expression();
      expect(Tok::Newline, "expected end of line after assignment");
      return make_stmt(AugAssign{std::move(target), op, std::move(v)}, first);
    }
    if (peek(1).kind != Tok::Assign) {
      throw ParseError(first.line, first.col, "expected '=' (expression statements are not allowed)");
    }
    Assign node;
    node.targets.push_back({advance().text, -1});
    advance();  // '='
    while (peek().kind == Tok::Ident && peek(1).kind == Tok::Assign) {
      node.targets.push_back({advance().text, -1});
      advance();
    }
    node.value = expression();
    expect(Tok::Newline, "expected end of line after assignment");
    return make_stmt(std::move(node), first);
  }

  Block block() {
    expect(Tok::Colon, "expected ':'");
    expect(Tok::Newline, "expected end of line after ':'");
    expect(Tok::Indent, "expected an indented block");
    Block body;
    while (!at(Tok::Dedent)) body.push_back(statement());
    advance();
    return body;
  }

  ExprPtr expression() { return or_expr(); }

  ExprPtr or_expr() {
    ExprPtr lhs = and_expr();
    while (at(Tok::Or)) {
      const Token& t = advance();
      lhs = make_expr(Bool{BoolOp::Or, std::move(lhs), and_expr()}, t);
    }
    return lhs;
  }

  ExprPtr and_expr() {
    ExprPtr lhs = comparison();
    while (at(Tok::And)) {
      const Token& t = advance();
      lhs = make_expr(Bool{BoolOp::And, std::move(lhs), comparison()}, t);
    }
    return lhs;
  }

  bool at_cmp() const {
    switch (peek().kind) {
      case Tok::EqEq: case Tok::NotEq: case Tok::Lt: case Tok::Le: case Tok::Gt: case Tok::Ge:
        return true;
      default:
        return false;
    }
  }

  ExprPtr comparison() {
    ExprPtr lhs = additive();
    if (!at_cmp()) return lhs;
    const Token& t = advance();
    CmpOp op;
    switch (t.kind) {
      case Tok::EqEq: op = CmpOp::Eq; break;
      case Tok::NotEq: op = CmpOp::Ne; break;
      case Tok::Lt: op = CmpOp::Lt; break;
      case Tok::Le: op = CmpOp::Le; break;
      case Tok::Gt: op = CmpOp::Gt; break;
      default: op = CmpOp::Ge; break;
    }
    ExprPtr rhs = additive();
    if (at_cmp()) {
      throw ParseError(peek().line, peek().col, "chained comparisons are not supported");
    }
    return make_expr(Compare{op, std::move(lhs), std::move(rhs)}, t);
  }

  ExprPtr additive() {
    ExprPtr lhs = multiplicative();
    while (at(Tok::Plus) || at(Tok::Minus)) {
      const Token& t = advance();
      BinOp op = t.kind == Tok::Plus ? BinOp::Add : BinOp::Sub;
      lhs = make_expr(Binary{op, std::move(lhs), multiplicative()}, t);
    }
    return lhs;
  }

  ExprPtr multiplicative() {
    ExprPtr lhs = unary();
    while (at(Tok::Star) || at(Tok::DblSlash) || at(Tok::Percent)) {
      const Token& t = advance();
      BinOp op = t.kind == Tok::Star ? BinOp::Mul
               : t.kind == Tok::DblSlash ? BinOp::FloorDiv
                                         : BinOp::Mod;
      lhs = make_expr(Binary{op, std::move(lhs), unary()}, t);
    }
    return lhs;
  }

  ExprPtr unary() {
    if (at(Tok::Minus)) {
      const Token& t = advance();
      return make_expr(Unary{UnOp::Neg, unary()}, t);
    }
    return power();
  }

  // '**' binds tighter than unary minus on its left and is right-associative;
  // its right operand may carry a sign (x ** -2 is a parse, though negative
  // exponents fail at evaluation).
  ExprPtr power() {
    ExprPtr base = atom();
    if (at(Tok::DblStar)) {
      const Token& t = advance();
      return make_expr(Binary{BinOp::Pow, std::move(base), unary()}, t);
    }
    return base;
  }

  ExprPtr atom() {
    const Token& t = peek();
    switch (t.kind) {
      case Tok::Number:
        advance();
        return make_expr(IntLit{t.num}, t);
      case Tok::Ident:
        advance();
        return make_expr(Name{t.text, -1}, t);
      case Tok::Abs: {
        advance();
        expect(Tok::LParen, "expected '(' after abs");
        ExprPtr inner = expression();
        expect(Tok::RParen, "expected ')'");
        return make_expr(Unary{UnOp::Abs, std::move(inner)}, t);
      }
      case Tok::LParen: {
        advance();
        ExprPtr inner = expression();
        expect(Tok::RParen, "expected ')'");
        return inner;
      }
      default:
        throw ParseError(t.line, t.col, "expected an expression");
    }
  }

  template <typename T>
  static ExprPtr make_expr(T&& node, const Token& t) {
    auto e = std::make_shared<Expr>();
    e->node = std::forward<T>(node);
    e->line = t.line;
    e->col = t.col;
    return e;
  }

  template <typename T>
  static StmtPtr make_stmt(T&& node, const Token& t) {
    auto s = std::make_shared<Stmt>();
    s->node = std::forward<T>(node);
    s->line = t.line;
    s->col = t.col;
    return s;
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

// Allocates variable slots (params, then first textual write) and checks the
// path-sensitive read-before-assignment rule, conservatively treating loop
// bodies as possibly skipped.
class Resolver {
 public:
  explicit Resolver(FunctionAst& f) : f_(f) {
    for (const auto& p : f.params) slot_of_.emplace(p, int(f_.locals.size())), f_.locals.push_back(p);
  }

  void run() {
    collect_writes(f_.body);
    std::set<int> defined;
    for (std::size_t i = 0; i < f_.params.size(); ++i) defined.insert(int(i));
    check_block(f_.body, defined);
    enforce_single_trailing_return();
    f_.statement_count = count_stmts(f_.body);
    f_.nesting_depth = depth(f_.body);
  }

 private:
  void collect_writes(const Block& b) {
    for (const auto& s : b) {
      std::visit(
          [&](auto& n) {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, Assign>) {
              for (auto& t : n.targets) t.slot = intern(t.id);
            } else if constexpr (std::is_same_v<T, AugAssign>) {
              n.target.slot = intern(n.target.id);
            } else if constexpr (std::is_same_v<T, If>) {
              for (auto& arm : n.arms) collect_writes(arm.body);
              collect_writes(n.orelse);
            } else if constexpr (std::is_same_v<T, While>) {
              collect_writes(n.body);
            } else if constexpr (std::is_same_v<T, ForRange>) {
              n.var.slot = intern(n.var.id);
              collect_writes(n.body);
            }
          },
          s->node);
    }
  }

  int intern(const std::string& id) {
    auto [it, inserted] = slot_of_.emplace(id, int(f_.locals.size()));
    if (inserted) f_.locals.push_back(id);
    return it->second;
  }

  void check_block(const Block& b, std::set<int>& defined) {
    for (const auto& s : b) {
      std::visit(
          [&](auto& n) {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, Assign>) {
              check_expr(*n.value, defined);
              for (const auto& t : n.targets) defined.insert(t.slot);
            } else if constexpr (std::is_same_v<T, AugAssign>) {
              if (!defined.count(n.target.slot)) {
                throw ParseError(s->line, s->col,
                                 "variable '" + n.target.id + "' read before assignment");
              }
              check_expr(*n.value, defined);
            } else if constexpr (std::is_same_v<T, If>) {
              std::vector<std::set<int>> exits;
              for (const auto& arm : n.arms) {
                check_expr(*arm.cond, defined);
                std::set<int> branch = defined;
                check_block(arm.body, branch);
                exits.push_back(std::move(branch));
              }
              if (!n.orelse.empty()) {
                std::set<int> branch = defined;
                check_block(n.orelse, branch);
                exits.push_back(std::move(branch));
                std::set<int> merged = std::move(exits[0]);
                for (std::size_t i = 1; i < exits.size(); ++i) {
                  std::set<int> next;
                  for (int v : merged)
                    if (exits[i].count(v)) next.insert(v);
                  merged = std::move(next);
                }
                defined = std::move(merged);
              }
              // No else: the whole If may be skipped, nothing new is definite.
            } else if constexpr (std::is_same_v<T, While>) {
              check_expr(*n.cond, defined);
              std::set<int> body = defined;
              check_block(n.body, body);
            } else if constexpr (std::is_same_v<T, ForRange>) {
              check_expr(*n.count, defined);
              std::set<int> body = defined;
              body.insert(n.var.slot);
              check_block(n.body, body);
            } else if constexpr (std::is_same_v<T, Return>) {
              check_expr(*n.value, defined);
            }
          },
          s->node);
    }
  }

  void check_expr(Expr& e, const std::set<int>& defined) {
    std::visit(
        [&](auto& n) {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, Name>) {
            auto it = slot_of_.find(n.id);
            if (it == slot_of_.end()) {
              throw ParseError(e.line, e.col, "unknown variable '" + n.id + "'");
            }
            n.slot = it->second;
            if (!defined.count(n.slot)) {
              throw ParseError(e.line, e.col,
                               "variable '" + n.id + "' may be read before assignment");
            }
          } else if constexpr (std::is_same_v<T, Unary>) {
            check_expr(*n.operand, defined);
          } else if constexpr (std::is_same_v<T, Binary> || std::is_same_v<T, Compare> ||
                               std::is_same_v<T, Bool>) {
            check_expr(*n.lhs, defined);
            check_expr(*n.rhs, defined);
          }
        },
        e.node);
  }

  void enforce_single_trailing_return() {
    int total = count_returns(f_.body);
    bool last_is_return =
        !f_.body.empty() && std::holds_alternative<Return>(f_.body.back()->node);
    if (total != 1 || !last_is_return) {
      int line = f_.body.empty() ? 1 : f_.body.back()->line;
      throw ParseError(line, 1,
                       "function must have exactly one return, as its final statement");
    }
  }

  static int count_returns(const Block& b) {
    int n = 0;
    for (const auto& s : b) {
      std::visit(
          [&](const auto& node) {
            using T = std::decay_t<decltype(node)>;
            if constexpr (std::is_same_v<T, Return>) {
              ++n;
            } else if constexpr (std::is_same_v<T, If>) {
              for (const auto& arm : node.arms) n += count_returns(arm.body);
              n += count_returns(node.orelse);
            } else if constexpr (std::is_same_v<T, While> || std::is_same_v<T, ForRange>) {
              n += count_returns(node.body);
            }
          },
          s->node);
    }
    return n;
  }

  static int count_stmts(const Block& b) {
    int n = 0;
    for (const auto& s : b) {
      n += 1;
      std::visit(
          [&](const auto& node) {
            using T = std::decay_t<decltype(node)>;
            if constexpr (std::is_same_v<T, If>) {
              for (const auto& arm : node.arms) n += count_stmts(arm.body);
              n += count_stmts(node.orelse);
            } else if constexpr (std::is_same_v<T, While> || std::is_same_v<T, ForRange>) {
              n += count_stmts(node.body);
            }
          },
          s->node);
    }
    return n;
  }

  static int depth(const Block& b) {
    int d = 0;
    for (const auto& s : b) {
      std::visit(
          [&](const auto& node) {
            using T = std::decay_t<decltype(node)>;
            if constexpr (std::is_same_v<T, If>) {
              int inner = 0;
              for (const auto& arm : node.arms) inner = std::max(inner, depth(arm.body));
              inner = std::max(inner, depth(node.orelse));
              d = std::max(d, 1 + inner);
            } else if constexpr (std::is_same_v<T, While> || std::is_same_v<T, ForRange>) {
              d = std::max(d, 1 + depth(node.body));
            }
          },
          s->node);
    }
    return d;
  }

  FunctionAst& f_;
  std::map<std::string, int> slot_of_;
};

}  // namespace

FunctionAst parse_function(const std::string& source) {
  FunctionAst f = Parser(Lexer(source).run()).run();
  Resolver(f).run();
  return f;
}

}  // namespace cfkit
