#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

#include "passage/kill_solver.hpp"
#include "passage/levy_model.hpp"
#include "passage/omega.hpp"

namespace passage {

struct PathConfig {
  LevyModel model;
  // Smallest diffusive step; steps grow away from the barrier up to dt_max.
  double dt = 1e-3;
  double dt_max = 10.0;
  // Step-size controls: kappa d^2/sigma^2 keeps crossings out of long steps,
  // weight_step/(omega + q) bounds the discount change per step.
  double kappa = 0.02;
  double weight_step = 0.05;
  // <= 0 selects the default 50 / max(q, |psi'(0+)|, 0.02).
  double t_max = 0.0;
  std::uint64_t seed = 42;
  std::size_t n_paths = 100000;
  double bias_budget = 1e-3;
  // Paths whose discount weight drops below this stop early; the residual
  // weight goes into the horizon bias bound.
  double weight_floor = 1e-10;
  unsigned threads = 1;
};

struct MCEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t n_paths = 0;
  double horizon_bias_bound = 0.0;
  std::uint64_t seed = 0;
};

double default_horizon(const LevyModel& model, double q);

MCEstimate estimate_B(const PathConfig& cfg, double q, const OmegaSpec& omega, double x, double c);

// E[e^{-gamma T}; T < zeta] with T = int_0^{tau_d^+} omega(X_u) du.
MCEstimate estimate_timechange_laplace(const PathConfig& cfg, double q, const OmegaSpec& omega, double gamma,
                                       double y, double d);

struct MartingaleResult {
  std::vector<MCEstimate> at;
  // Paired per-path differences Z_{t_k} - Z_{t_l}: mean and standard error.
  std::vector<std::vector<double>> diff_mean;
  std::vector<std::vector<double>> diff_std_error;
};

MartingaleResult martingale_check(const PathConfig& cfg, double q, const OmegaSpec& omega, const KillSolution& H,
                                  double x, double c, const std::vector<double>& times);

}  // namespace passage
