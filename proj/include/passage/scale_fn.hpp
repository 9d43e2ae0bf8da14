#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "passage/levy_model.hpp"

namespace passage {

// One term (coeff + linear*u) * exp(rate*u) of the partial-fraction
// expansion of W^(q).
struct ExpTerm {
  double rate;
  double coeff;
  double linear;
};

// W^(q) as an exact finite exponential sum. Available for both built-in
// families because 1/(psi - q) is rational in theta for them.
class ScaleExpansion {
 public:
  ScaleExpansion(const LevyModel& model, double q);

  double operator()(double u) const;
  std::span<const ExpTerm> terms() const noexcept { return terms_; }
  double q() const noexcept { return q_; }
  double phi() const noexcept { return phi_; }

  // int_0^inf e^{-beta t} W(d + t) dt for beta > Phi(q), d >= 0.
  double upper_laplace(double beta, double d) const;
  // int_{-inf}^{y_max} e^{beta y} W(x - y) dy for x >= y_max.
  double exp_tail_integral(double beta, double x, double y_max) const;

 private:
  double q_;
  double phi_;
  std::vector<ExpTerm> terms_;
};

enum class ScaleMethod { Auto, ClosedForm, Talbot };

class ScaleGrid {
 public:
  ScaleGrid(const LevyModel& model, double q, double x_max, double step, std::vector<double> values);

  double q() const noexcept { return q_; }
  double x_max() const noexcept { return x_max_; }
  double step() const noexcept { return step_; }
  std::size_t size() const noexcept { return values_.size(); }
  const std::vector<double>& values() const noexcept { return values_; }
  std::vector<double>& mutable_values() noexcept { return values_; }
  double tail_slope() const noexcept { return tail_slope_; }
  // 1/psi'(Phi(q)+), +inf in the critical case.
  double tail_amplitude() const noexcept { return tail_amplitude_; }
  const LevyModel& model() const noexcept { return model_; }

  double eval(double x) const;
  double tilted(double x) const;
  // Past x_max the asymptote e^{Phi x}/psi'(Phi+) is used; range error if
  // the amplitude is infinite.
  double extended(double x) const;

 private:
  LevyModel model_;
  double q_;
  double x_max_;
  double step_;
  std::vector<double> values_;
  double tail_slope_;
  double tail_amplitude_;
};

ScaleGrid scale_build(const LevyModel& model, double q, double x_max, double h,
                      ScaleMethod method = ScaleMethod::Auto);
inline double scale_eval(const ScaleGrid& g, double x) { return g.eval(x); }
inline double tilted_eval(const ScaleGrid& g, double x) { return g.tilted(x); }
double laplace_residual(const ScaleGrid& g, double theta, double A);

// Fixed-Talbot inversion (32 nodes) of 1/(psi(s) - q) at x > 0.
double talbot_scale(const LevyModel& model, double q, double x);

}  // namespace passage
