#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "passage/levy_model.hpp"
#include "passage/omega.hpp"

namespace passage {

enum class Subcommand { Psi, Scale, Solve, Series, Mc, Sell, Verify };

Subcommand subcommand_from(std::string_view name);
std::string_view subcommand_name(Subcommand s) noexcept;

struct OmegaConfig {
  // Arithmetic body in x; absent means omega is its tail formula everywhere.
  std::optional<std::string> body;
  TailClass tail = TailZero{};
  std::optional<double> x_tail;

  OmegaSpec build() const;
};

enum class SolveMethod { Auto, Volterra, Picard };
enum class SeriesKind { Patie, Csbp, Powertail };

struct RunConfig {
  Subcommand subcommand = Subcommand::Verify;
  LevyModel model = LevyModel::brownian(0.0, 2.0);
  double q = 0.0;
  OmegaConfig omega;

  // solve
  double x_min = -10.0;
  double c_max = 3.0;
  // 0 until given; see step().
  double h = 0.0;
  double tol = 1e-8;
  SolveMethod method = SolveMethod::Auto;
  int depth = 3;

  // psi (default 0.5, 1, 2) and csbp (first entry; default Phi(q) + 1)
  std::vector<double> theta;
  double x_max = 10.0;

  // series
  SeriesKind kind = SeriesKind::Patie;
  int n = 2;
  double x_from = -8.0;
  double x_to = 0.0;
  int points = 161;

  // mc
  std::size_t paths = 100000;
  std::uint64_t seed = 42;
  double dt = 1e-3;
  double tmax = 0.0;
  double x = 0.0;
  double c = 1.0;
  unsigned threads = 1;
  double bias_budget = 1e-3;

  // sell and series parameters
  double gamma = 1.0;
  double alpha = 1.0;
  double z = 1.0;
  double bmax = 30.0;
  std::string svg;

  // verify
  bool list = false;
  std::string inject_fault;
  std::string out_dir;

  std::string out;

  // Grid step: h if given, else 1e-3 (c_max - x_min) for solve, 1e-3 x_max
  // for scale and 1e-3 for sell.
  double step() const noexcept;
};

// Strict: unknown keys, wrong types and violated preconditions all raise
// ConfigError with the offending key path.
RunConfig parse_config(const nlohmann::json& doc);
RunConfig parse_config(std::string_view text);

LevyModel parse_model(const nlohmann::json& j, const std::string& path = "model");
OmegaConfig parse_omega(const nlohmann::json& j, const std::string& path = "omega");

}  // namespace passage
