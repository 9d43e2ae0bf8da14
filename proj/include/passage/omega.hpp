#pragma once

#include <functional>
#include <string>
#include <variant>

namespace passage {

struct TailZero {};
struct TailConstant {
  double a;
};
// gamma e^{alpha y}
struct TailExponential {
  double gamma;
  double alpha;
};
// gamma |y|^degree e^{alpha y}
struct TailPowerExp {
  double gamma;
  double alpha;
  int degree;
};
// gamma / |y| on (-inf, -c]
struct TailCsbp {
  double gamma;
  double c;
};
// gamma / |y|^n on (-inf, -c]
struct TailPower {
  double gamma;
  int n;
  double c;
};

using TailClass = std::variant<TailZero, TailConstant, TailExponential, TailPowerExp, TailCsbp, TailPower>;

double tail_value(const TailClass& tail, double x);
std::string tail_name(const TailClass& tail);

// Killing rate: the declared tail formula on (-inf, x_tail], body above.
class OmegaSpec {
 public:
  using Body = std::function<double(double)>;

  OmegaSpec(Body body, TailClass tail, double x_tail);

  // omega equal to its tail formula everywhere the formula is defined.
  static OmegaSpec pure(const TailClass& tail);

  double operator()(double x) const { return x <= x_tail_ ? tail_value(tail_, x) : body_(x); }
  const TailClass& tail_class() const noexcept { return tail_; }
  double x_tail() const noexcept { return x_tail_; }
  const Body& body() const noexcept { return body_; }

  // Sampled finiteness and nonnegativity on [lo, hi]; domain error otherwise.
  void check_range(double lo, double hi, int samples = 4096) const;
  OmegaSpec scaled(double factor) const;

 private:
  Body body_;
  TailClass tail_;
  double x_tail_;
};

}  // namespace passage
