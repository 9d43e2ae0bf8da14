#include "passage/expression.hpp"

#include <cctype>
#include <charconv>
#include <cmath>

#include "passage/errors.hpp"

namespace passage {

class ExpressionParser {
 public:
  explicit ExpressionParser(std::string_view s) : s_(s) {}

  Expression run() {
    Expression e;
    e.source_ = std::string(s_);
    out_ = &e.code_;
    expr();
    skip();
    if (pos_ != s_.size()) error("unexpected trailing input");
    e.max_depth_ = max_depth_;
    return e;
  }

 private:
  using Op = Expression::Op;

  [[noreturn]] void error(const std::string& what) const {
    throw ConfigError("expression '" + std::string(s_) + "' at offset " + std::to_string(pos_) + ": " + what);
  }

  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool accept(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  void expect(char c) {
    if (!accept(c)) error(std::string("expected '") + c + "'");
  }
  void emit(Op op, double v = 0.0) {
    out_->push_back({op, v});
    switch (op) {
      case Op::Const:
      case Op::Var:
        ++depth_;
        break;
      case Op::Neg:
      case Op::Exp:
      case Op::Abs:
        break;
      default:
        --depth_;
    }
    max_depth_ = std::max(max_depth_, depth_);
  }

  void expr() {
    term();
    for (;;) {
      if (accept('+')) {
        term();
        emit(Op::Add);
      } else if (accept('-')) {
        term();
        emit(Op::Sub);
      } else {
        return;
      }
    }
  }

  void term() {
    unary();
    for (;;) {
      if (accept('*')) {
        unary();
        emit(Op::Mul);
      } else if (accept('/')) {
        unary();
        emit(Op::Div);
      } else {
        return;
      }
    }
  }

  void unary() {
    if (accept('-')) {
      unary();
      emit(Op::Neg);
    } else if (accept('+')) {
      unary();
    } else {
      primary();
    }
  }

  void primary() {
    skip();
    if (pos_ >= s_.size()) error("unexpected end of input");
    const char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      expr();
      expect(')');
      return;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      double v = 0.0;
      const auto [p, ec] = std::from_chars(s_.data() + pos_, s_.data() + s_.size(), v);
      if (ec != std::errc()) error("malformed number");
      pos_ = static_cast<std::size_t>(p - s_.data());
      emit(Op::Const, v);
      return;
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      const std::size_t start = pos_;
      while (pos_ < s_.size() && std::isalnum(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      const std::string_view name = s_.substr(start, pos_ - start);
      if (name == "x") {
        emit(Op::Var);
        return;
      }
      int arity = 0;
      Op op{};
      if (name == "exp") { op = Op::Exp; arity = 1; }
      else if (name == "abs") { op = Op::Abs; arity = 1; }
      else if (name == "min") { op = Op::Min; arity = 2; }
      else if (name == "max") { op = Op::Max; arity = 2; }
      else if (name == "pow") { op = Op::Pow; arity = 2; }
      else { pos_ = start; error("unknown identifier '" + std::string(name) + "'"); }
      expect('(');
      expr();
      if (arity == 2) {
        expect(',');
        expr();
      }
      expect(')');
      emit(op);
      return;
    }
    error(std::string("unexpected character '") + c + "'");
  }

  std::string_view s_;
  std::size_t pos_ = 0;
  std::vector<Expression::Instr>* out_ = nullptr;
  int depth_ = 0;
  int max_depth_ = 0;
};

Expression Expression::parse(std::string_view text) { return ExpressionParser(text).run(); }

double Expression::operator()(double x) const {
  constexpr int kInline = 32;
  double inline_stack[kInline] = {};
  std::vector<double> heap;
  double* st = inline_stack;
  if (max_depth_ > kInline) {
    heap.resize(max_depth_);
    st = heap.data();
  }
  int sp = 0;
  for (const auto& in : code_) {
    switch (in.op) {
      case Op::Const: st[sp++] = in.value; break;
      case Op::Var: st[sp++] = x; break;
      case Op::Neg: st[sp - 1] = -st[sp - 1]; break;
      case Op::Exp: st[sp - 1] = std::exp(st[sp - 1]); break;
      case Op::Abs: st[sp - 1] = std::abs(st[sp - 1]); break;
      case Op::Add: --sp; st[sp - 1] += st[sp]; break;
      case Op::Sub: --sp; st[sp - 1] -= st[sp]; break;
      case Op::Mul: --sp; st[sp - 1] *= st[sp]; break;
      case Op::Div: --sp; st[sp - 1] /= st[sp]; break;
      case Op::Min: --sp; st[sp - 1] = std::min(st[sp - 1], st[sp]); break;
      case Op::Max: --sp; st[sp - 1] = std::max(st[sp - 1], st[sp]); break;
      case Op::Pow: --sp; st[sp - 1] = std::pow(st[sp - 1], st[sp]); break;
    }
  }
  return st[0];
}

}  // namespace passage
