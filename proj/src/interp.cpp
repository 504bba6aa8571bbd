#include "cfkit/interp.hpp"

namespace cfkit {
namespace {

// Internal signal: the trace sink is full, stop executing. Never escapes
// execution_trace.
struct TraceFull {};

// Coarse class of an expression's top node for trace tag details: arithmetic
// ops by symbol ('^' for **, so * and ** stay distinct), comparisons and
// booleans 'c', negation 'u', abs 'b', plain literal or name 'v'.
char expr_class(const Expr& e) {
  struct V {
    char operator()(const IntLit&) const { return 'v'; }
    char operator()(const Name&) const { return 'v'; }
    char operator()(const Unary& u) const { return u.op == UnOp::Neg ? 'u' : 'b'; }
    char operator()(const Binary& b) const {
      switch (b.op) {
        case BinOp::Add: return '+';
        case BinOp::Sub: return '-';
        case BinOp::Mul: return '*';
        case BinOp::FloorDiv: return '/';
        case BinOp::Mod: return '%';
        case BinOp::Pow: return '^';
      }
      return '?';
    }
    char operator()(const Compare&) const { return 'c'; }
    char operator()(const Bool&) const { return 'c'; }
  };
  return std::visit(V{}, e.node);
}

class Evaluator {
 public:
  Evaluator(const FunctionAst& f, const EvalLimits& limits)
      : f_(f),
        limits_(limits),
        fuel_(limits.fuel),
        env_(f.locals.size(), 0),
        bound_(f.locals.size(), 0) {
    if (limits.fuel <= 0 || limits.magnitude_cap <= 0) {
      throw EvalError("limits must be positive");
    }
  }

  void set_trace(std::vector<std::uint16_t>* sink, std::size_t cap) {
    trace_ = sink;
    trace_cap_ = cap;
  }

  Value run(const std::vector<Value>& args) {
    if (args.size() != f_.params.size()) {
      throw EvalError("expected " + std::to_string(f_.params.size()) + " argument(s), got " +
                      std::to_string(args.size()));
    }
    for (std::size_t i = 0; i < args.size(); ++i) {
      env_[i] = args[i];
      bound_[i] = 1;
    }
    if (!exec_block(f_.body)) throw MissingReturn();
    return ret_;
  }

 private:
  void charge() {
    if (fuel_ == 0) throw FuelExhausted();
    --fuel_;
  }

  void emit(FlowTagKind kind, unsigned char detail = 0) {
    if (!trace_) return;
    if (trace_->size() >= trace_cap_) throw TraceFull{};
    trace_->push_back(flow_tag(kind, detail));
  }

  void emit(FlowTagKind kind, const Expr& value) {
    emit(kind, static_cast<unsigned char>(expr_class(value)));
  }

  Value checked(Value v) const {
    if (v > limits_.magnitude_cap || v < -limits_.magnitude_cap) {
      throw ArithmeticError("value exceeds magnitude cap");
    }
    return v;
  }

  Value add(Value a, Value b) const {
    Value r;
    if (__builtin_add_overflow(a, b, &r)) throw ArithmeticError("integer overflow");
    return checked(r);
  }
  Value sub(Value a, Value b) const {
    Value r;
    if (__builtin_sub_overflow(a, b, &r)) throw ArithmeticError("integer overflow");
    return checked(r);
  }
  Value mul(Value a, Value b) const {
    Value r;
    if (__builtin_mul_overflow(a, b, &r)) throw ArithmeticError("integer overflow");
    return checked(r);
  }
  Value floordiv(Value a, Value b) const {
    if (b == 0) throw ArithmeticError("division by zero");
    if (a == INT64_MIN && b == -1) throw ArithmeticError("integer overflow");
    Value q = a / b;
    if (a % b != 0 && ((a < 0) != (b < 0))) --q;
    return checked(q);
  }
  Value mod(Value a, Value b) const {
    if (b == 0) throw ArithmeticError("modulo by zero");
    if (a == INT64_MIN && b == -1) return 0;
    Value r = a % b;
    if (r != 0 && ((r < 0) != (b < 0))) r += b;
    return checked(r);
  }
  Value power(Value a, Value b) const {
    if (b < 0) throw NegativeExponent();
    Value result = 1;
    Value base = a;
    while (b > 0) {
      if (b & 1) result = mul(result, base);
      b >>= 1;
      if (b > 0) base = mul(base, base);
    }
    return result;
  }

  static bool truthy(Value v) { return v != 0; }

  Value eval(const Expr& e) {
    return std::visit(
        [&](const auto& n) -> Value {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, IntLit>) {
            return checked(n.value);
          } else if constexpr (std::is_same_v<T, Name>) {
            if (n.slot < 0 || !bound_[std::size_t(n.slot)]) throw UnboundVariable(n.id);
            return env_[std::size_t(n.slot)];
          } else if constexpr (std::is_same_v<T, Unary>) {
            Value v = eval(*n.operand);
            if (n.op == UnOp::Neg) return sub(0, v);
            return v < 0 ? sub(0, v) : v;
          } else if constexpr (std::is_same_v<T, Binary>) {
            Value a = eval(*n.lhs);
            Value b = eval(*n.rhs);
            switch (n.op) {
              case BinOp::Add: return add(a, b);
              case BinOp::Sub: return sub(a, b);
              case BinOp::Mul: return mul(a, b);
              case BinOp::FloorDiv: return floordiv(a, b);
              case BinOp::Mod: return mod(a, b);
              case BinOp::Pow: return power(a, b);
            }
            throw EvalError("bad operator");
          } else if constexpr (std::is_same_v<T, Compare>) {
            Value a = eval(*n.lhs);
            Value b = eval(*n.rhs);
            switch (n.op) {
              case CmpOp::Eq: return a == b;
              case CmpOp::Ne: return a != b;
              case CmpOp::Lt: return a < b;
              case CmpOp::Le: return a <= b;
              case CmpOp::Gt: return a > b;
              case CmpOp::Ge: return a >= b;
            }
            throw EvalError("bad comparison");
          } else {
            static_assert(std::is_same_v<T, Bool>);
            Value a = eval(*n.lhs);
            if (n.op == BoolOp::And) return truthy(a) ? eval(*n.rhs) : a;
            return truthy(a) ? a : eval(*n.rhs);
          }
        },
        e.node);
  }

  void store(const Name& target, Value v) {
    env_[std::size_t(target.slot)] = v;
    bound_[std::size_t(target.slot)] = 1;
  }

  Value load_for_aug(const Name& target) {
    if (target.slot < 0 || !bound_[std::size_t(target.slot)]) throw UnboundVariable(target.id);
    return env_[std::size_t(target.slot)];
  }

  // Returns true once a return statement has fired.
  bool exec_block(const Block& b) {
    for (const auto& s : b) {
      if (exec_stmt(*s)) return true;
    }
    return false;
  }

  bool exec_stmt(const Stmt& s) {
    charge();
    return std::visit(
        [&](const auto& n) -> bool {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, Assign>) {
            emit(n.targets.size() > 1 ? kFlowChained : kFlowAssign, *n.value);
            Value v = eval(*n.value);
            for (const auto& t : n.targets) store(t, v);
            return false;
          } else if constexpr (std::is_same_v<T, AugAssign>) {
            emit(kFlowAug, *n.value);
            Value cur = load_for_aug(n.target);
            Value rhs = eval(*n.value);
            Value v;
            switch (n.op) {
              case BinOp::Add: v = add(cur, rhs); break;
              case BinOp::Sub: v = sub(cur, rhs); break;
              case BinOp::Mul: v = mul(cur, rhs); break;
              case BinOp::FloorDiv: v = floordiv(cur, rhs); break;
              case BinOp::Mod: v = mod(cur, rhs); break;
              case BinOp::Pow: v = power(cur, rhs); break;
              default: throw EvalError("bad operator");
            }
            store(n.target, v);
            return false;
          } else if constexpr (std::is_same_v<T, If>) {
            emit(kFlowIfOpen);
            for (std::size_t i = 0; i < n.arms.size(); ++i) {
              if (truthy(eval(*n.arms[i].cond))) {
                emit(kFlowArmTaken, static_cast<unsigned char>(i));
                if (exec_block(n.arms[i].body)) return true;
                emit(kFlowIfClose);
                return false;
              }
            }
            emit(kFlowElseTaken);
            if (exec_block(n.orelse)) return true;
            emit(kFlowIfClose);
            return false;
          } else if constexpr (std::is_same_v<T, While>) {
            emit(kFlowWhileOpen);
            // First condition check rides on the statement's own charge;
            // each later check charges one unit so a spin costs fuel even
            // with an empty-feeling body.
            bool first = true;
            while (true) {
              if (!first) charge();
              first = false;
              if (!truthy(eval(*n.cond))) {
                emit(kFlowWhileClose);
                return false;
              }
              if (exec_block(n.body)) return true;
            }
          } else if constexpr (std::is_same_v<T, ForRange>) {
            emit(kFlowForOpen);
            Value count = eval(*n.count);
            for (Value i = 0; i < count; ++i) {
              store(n.var, i);
              if (exec_block(n.body)) return true;
            }
            emit(kFlowForClose);
            return false;
          } else if constexpr (std::is_same_v<T, Pass>) {
            emit(kFlowPass);
            return false;
          } else {
            static_assert(std::is_same_v<T, Return>);
            emit(kFlowReturn, *n.value);
            ret_ = eval(*n.value);
            return true;
          }
        },
        s.node);
  }

  const FunctionAst& f_;
  const EvalLimits& limits_;
  std::int64_t fuel_;
  std::vector<Value> env_;
  std::vector<char> bound_;
  Value ret_ = 0;
  std::vector<std::uint16_t>* trace_ = nullptr;
  std::size_t trace_cap_ = 0;
};

}  // namespace

Value evaluate_params(const FunctionAst& f, const std::vector<Value>& args,
                      const EvalLimits& limits) {
  return Evaluator(f, limits).run(args);
}

std::vector<std::uint16_t> execution_trace(const FunctionAst& f, const std::vector<Value>& args,
                                           const EvalLimits& limits, std::size_t max_tags) {
  std::vector<std::uint16_t> trace;
  trace.reserve(std::min<std::size_t>(max_tags, 128));
  Evaluator ev(f, limits);
  ev.set_trace(&trace, max_tags);
  try {
    ev.run(args);
  } catch (const TraceFull&) {
    trace.push_back(flow_tag(kFlowTraceCap));
  } catch (const EvalError&) {
    trace.push_back(flow_tag(kFlowEvalError));
  }
  return trace;
}

Value evaluate(const FunctionAst& f, const std::map<std::string, Value>& args,
               const EvalLimits& limits) {
  std::vector<Value> positional;
  positional.reserve(f.params.size());
  for (const auto& p : f.params) {
    auto it = args.find(p);
    if (it == args.end()) throw UnboundVariable(p);
    positional.push_back(it->second);
  }
  if (args.size() != f.params.size()) {
    throw EvalError("argument map contains a name that is not a parameter");
  }
  return evaluate_params(f, positional, limits);
}

}  // namespace cfkit
