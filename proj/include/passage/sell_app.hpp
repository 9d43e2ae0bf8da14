#pragma once

#include <iosfwd>
#include <vector>

#include "passage/closed_forms.hpp"
#include "passage/kill_solver.hpp"
#include "passage/levy_model.hpp"
#include "passage/scale_fn.hpp"

namespace passage {

// Sell an asset bought at z once S = e^X first reaches b, while the holder
// is killed at rate omega = gamma (e^{alpha x} ^ 1) plus q.
struct SellProblem {
  LevyModel model;
  double q = 0.0;
  double alpha = 1.0;
  double gamma = 0.0;
  double z = 1.0;
};

// Killing rate of the problem as a full-line spec (exponential tail below 0).
OmegaSpec sell_omega(const SellProblem& p);

// Forcing term of the half-line equation for H on [0, inf):
//   h(x) = L e^{Phi x} + gamma int_{-inf}^0 e^{alpha y} P(y) W(x - y) dy,
// P the exponential-killing solution that H equals on (-inf, 0].
class Forcing {
 public:
  explicit Forcing(const SellProblem& p);

  double operator()(double x) const;
  const PatieSeries& patie() const noexcept { return patie_; }
  const ScaleExpansion& kernel() const noexcept { return W_; }

  // Quadrature covers [cut, 0]; below it the Patie terms integrate exactly.
  static constexpr double cut = -10.0;

 private:
  SellProblem p_;
  PatieSeries patie_;
  ScaleExpansion W_;
  std::vector<double> tail_coeff_;
};

double h_eval(const SellProblem& p, double x);

// gamma sum gamma^k/(k!^2 (k+1)) / sum gamma^k/k!^2
double b_gamma(double gamma);

// H on [-10, x_max]: P below 0 and the Volterra march on [0, x_max] above.
// L is the Patie constant, since H = P on the negative half-line.
KillSolution solve_H_halfline(const SellProblem& p, double x_max, double h_step, double tol);

// Closed form for psi(s) = s^2, q = 0, alpha = 1.
double brownian_H(double gamma, double x);

double objective_A(const SellProblem& p, const KillSolution& H, double b);

struct SellCurve {
  std::vector<double> b;
  std::vector<double> A;
  double b_star = 0.0;
  double A_star = 0.0;
};

// 512-point log-spaced scan of [z, b_max], then golden-section refinement
// around the best scan point.
SellCurve argmax_A(const SellProblem& p, const KillSolution& H, double b_max, int scan_points = 512);

// H^(s)(psi(s) - gamma - q) - h^(s)(psi(s) - q): zero when H solves the
// half-line equation. H^ uses Simpson on the grid plus the e^{Phi(q+gamma) x}
// asymptote beyond it.
double laplace_defect(const SellProblem& p, const KillSolution& H, double s);

void write_svg(std::ostream& os, const SellCurve& curve);

}  // namespace passage
