#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace passage {

// Arithmetic in one variable x: + - * / unary minus, parentheses, numeric
// literals, exp(e), abs(e), min(a,b), max(a,b), pow(a,b). Compiled to a
// postfix program at parse time.
class Expression {
 public:
  static Expression parse(std::string_view text);

  double operator()(double x) const;
  const std::string& source() const noexcept { return source_; }

 private:
  enum class Op : unsigned char { Const, Var, Neg, Add, Sub, Mul, Div, Exp, Abs, Min, Max, Pow };
  struct Instr {
    Op op;
    double value;
  };

  friend class ExpressionParser;
  std::string source_;
  std::vector<Instr> code_;
  int max_depth_ = 0;
};

}  // namespace passage
