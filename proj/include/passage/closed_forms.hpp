#pragma once

#include <cstddef>
#include <vector>

#include "passage/levy_model.hpp"

namespace passage {

// H for omega = gamma e^{alpha x}:
//   sum_k a_k gamma^k e^{(Phi+alpha k) x} / sum_k a_k gamma^k,
//   a_k = 1 / prod_{l<=k} (psi(Phi + l alpha) - q).
class PatieSeries {
 public:
  static constexpr std::size_t kMaxTerms = 200;

  PatieSeries(const LevyModel& model, double q, double alpha, double gamma);

  double H(double x) const;
  // log sum_k a_k gamma^k e^{(Phi+alpha k) x}
  double log_unnormalized(double x) const;
  double L() const noexcept { return L_; }
  double phi() const noexcept { return phi_; }
  double q() const noexcept { return q_; }
  double alpha() const noexcept { return alpha_; }
  double gamma() const noexcept { return gamma_; }
  // log a_k for k = 0..kMaxTerms.
  const std::vector<double>& log_coefficients() const noexcept { return log_a_; }
  // Number of terms needed at x = 0.
  std::size_t K() const noexcept { return k_zero_; }

 private:
  double log_sum(double x, std::size_t* used) const;

  double q_, alpha_, gamma_, phi_;
  std::vector<double> log_a_;
  double log_norm_ = 0.0;
  double L_ = 1.0;
  std::size_t k_zero_ = 0;
};

inline double patie_H(const PatieSeries& s, double x) { return s.H(x); }

// H for omega = gamma/|x| on (-inf, -c], defined up to a constant:
//   int_Phi^inf dz/(psi(z)-q) exp(x z + int_theta^z gamma/(psi(u)-q) du).
// Evaluated in v = log(z - Phi) on a lattice anchored at log(theta - Phi).
class CsbpFunction {
 public:
  CsbpFunction(const LevyModel& model, double q, double gamma, double c, double theta);

  double log_value(double x) const;
  double value(double x) const;
  double ratio(double x1, double x2) const;
  // value(x)/value(-c)
  double normalized(double x) const;
  double phi() const noexcept { return phi_; }

 private:
  double G(long k) const;
  double log_integrand(long k, double x) const;

  LevyModel model_;
  double q_, gamma_, c_, theta_, phi_;
  double v_anchor_;
  double dv_ = 0.02;
  long k_lo_ = 0;
  std::vector<double> table_;
  double left_slope_ = 0.0;
  double right_slope_ = 0.0;
  bool critical_ = false;
  double log_norm_ = 0.0;
};

double csbp_H(const LevyModel& model, double q, double gamma, double c, double theta, double x);

struct PowerTailValue {
  double value;
  // e^{-Phi x} value = 1 + sum of the depth terms
  double scaled;
  double last_term;
};

PowerTailValue powertail_terms(const LevyModel& model, double q, double gamma, int n, double c, int depth,
                               double x);

}  // namespace passage
