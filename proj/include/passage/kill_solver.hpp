#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "passage/levy_model.hpp"
#include "passage/omega.hpp"

namespace passage {

// H on the grid x_min + i*step, normalised so H(0) = 1 (0 is a node).
struct KillSolution {
  double q = 0.0;
  double phi = 0.0;
  double x_min = 0.0;
  double step = 0.0;
  std::vector<double> H;
  double L = 0.0;
  // Sup-norm fixed-point defect relative to sup H.
  double residual = 0.0;
  // A priori bound on truncation error, relative to sup H.
  double trunc_bound = 0.0;
  int iterations = 0;

  double x_at(std::size_t i) const noexcept { return x_min + static_cast<double>(i) * step; }
  double x_max() const noexcept { return x_at(H.size() - 1); }
  std::size_t zero_index() const noexcept;
  // Log-linear interpolation; range error outside [x_min, x_max].
  double at(double x) const;
};

struct PicardOptions {
  // Record every iterate (for monotonicity checks).
  bool keep_iterates = false;
};

struct PicardTrace {
  std::vector<std::vector<double>> iterates;
  int predicted_iterations = 0;
};

KillSolution solve_picard(const LevyModel& model, double q, const OmegaSpec& omega, double x_min, double c_max,
                          double h, double tol, PicardTrace* trace = nullptr, const PicardOptions& opt = {});

KillSolution solve_volterra(const LevyModel& model, double q, const OmegaSpec& omega, double x_min, double c_max,
                            double h, double tol, int powertail_depth = 3);

// Volterra when the tail class allows it, Picard otherwise.
KillSolution solve(const LevyModel& model, double q, const OmegaSpec& omega, double x_min, double c_max, double h,
                   double tol);

double passage_prob(const KillSolution& sol, double x, double c);

double trunc_bound(const LevyModel& model, double q, double gamma, double alpha, int n, double x);

struct MixtureAtom {
  double alpha;
  double weight;
};

struct Mixture {
  OmegaSpec omega;
  std::function<double(double)> H;
  double L;
};

Mixture mixture_build(const std::vector<MixtureAtom>& atoms, const LevyModel& model, double q);

// Gregory (fourth-order end-corrected trapezoid) weights for an integral over
// n >= 1 equal intervals; short panels fall back to Newton-Cotes rules.
double quadrature_weight(std::size_t n, std::size_t j) noexcept;

}  // namespace passage
