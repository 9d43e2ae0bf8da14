#include <CLI11.hpp>
#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "json.hpp"
#include "passage/closed_forms.hpp"
#include "passage/config.hpp"
#include "passage/csv.hpp"
#include "passage/errors.hpp"
#include "passage/kill_solver.hpp"
#include "passage/mc_oracle.hpp"
#include "passage/scale_fn.hpp"
#include "passage/sell_app.hpp"
#include "passage/verify.hpp"

using namespace passage;
using nlohmann::json;

namespace {

// Command-line values that override keys of the JSON config.
struct Overrides {
  std::string config_path;
  std::optional<std::string> family;
  std::optional<double> drift, variance, premium, jump_rate, eta;
  std::optional<std::string> omega;
  std::vector<std::pair<std::string, std::optional<double>>> numbers;
  std::vector<std::pair<std::string, std::optional<long long>>> integers;
  std::vector<std::pair<std::string, std::optional<std::string>>> strings;
  std::optional<std::vector<double>> theta;
  std::optional<std::uint64_t> seed;
  std::optional<std::vector<int>> only;
  bool list = false;
};

void add_model_flags(CLI::App* app, Overrides& o) {
  app->add_option("--config", o.config_path, "JSON config; flags override its keys");
  app->add_option("--family", o.family, "brownian or cramer_lundberg");
  app->add_option("--drift", o.drift, "Brownian drift mu");
  app->add_option("--variance", o.variance, "Gaussian variance sigma^2");
  app->add_option("--premium", o.premium, "Cramer-Lundberg premium rate c");
  app->add_option("--jump-rate", o.jump_rate, "Cramer-Lundberg jump rate lambda");
  app->add_option("--eta", o.eta, "rate of the exponential jump sizes");
}

// Registers --<flag> writing JSON key `key`. Storage must outlive parsing,
// so the vectors are reserved up front.
void number(CLI::App* app, Overrides& o, const std::string& flag, const std::string& key, const std::string& help) {
  o.numbers.emplace_back(key, std::nullopt);
  app->add_option("--" + flag, o.numbers.back().second, help);
}
void integer(CLI::App* app, Overrides& o, const std::string& flag, const std::string& key, const std::string& help) {
  o.integers.emplace_back(key, std::nullopt);
  app->add_option("--" + flag, o.integers.back().second, help);
}
void text(CLI::App* app, Overrides& o, const std::string& flag, const std::string& key, const std::string& help) {
  o.strings.emplace_back(key, std::nullopt);
  app->add_option("--" + flag, o.strings.back().second, help);
}

json load(const Overrides& o, const std::string& sub) {
  json doc = json::object();
  if (!o.config_path.empty()) {
    std::ifstream f(o.config_path);
    if (!f) throw ConfigError("config: cannot open " + o.config_path);
    std::stringstream ss;
    ss << f.rdbuf();
    try {
      doc = json::parse(ss.str());
    } catch (const json::parse_error& e) {
      throw ConfigError("config: malformed JSON in " + o.config_path + ": " + e.what());
    }
    if (!doc.is_object()) throw ConfigError("config: top level must be an object");
    if (doc.contains("subcommand") && doc["subcommand"] != sub) {
      throw ConfigError("subcommand: config is for '" + doc["subcommand"].dump() + "', not '" + sub + "'");
    }
  }
  doc["subcommand"] = sub;
  auto model_key = [&](const char* key, const std::optional<double>& v) {
    if (v) doc["model"][key] = *v;
  };
  if (o.family) {
    // A new family replaces the whole model object.
    doc["model"] = json::object({{"family", *o.family}});
  }
  model_key("drift", o.drift);
  model_key("variance", o.variance);
  model_key("premium", o.premium);
  model_key("jump_rate", o.jump_rate);
  model_key("eta", o.eta);
  if (o.omega) {
    try {
      doc["omega"] = json::parse(*o.omega);
    } catch (const json::parse_error& e) {
      throw ConfigError(std::string("omega: malformed JSON: ") + e.what());
    }
  }
  for (const auto& [k, v] : o.numbers) {
    if (v) doc[k] = *v;
  }
  for (const auto& [k, v] : o.integers) {
    if (v) doc[k] = *v;
  }
  for (const auto& [k, v] : o.strings) {
    if (v) doc[k] = *v;
  }
  if (o.theta) doc["theta"] = *o.theta;
  if (o.seed) doc["seed"] = *o.seed;
  if (o.list) doc["list"] = true;
  return doc;
}

void emit(const RunConfig& cfg, const std::string& body) {
  if (cfg.out.empty()) {
    std::cout << body;
    return;
  }
  std::ofstream f(cfg.out, std::ios::binary);
  if (!f) throw ConfigError("out: cannot write " + cfg.out);
  f << body;
}

int run_psi(const RunConfig& cfg) {
  std::ostringstream os;
  CsvWriter w(os, {"theta", "psi", "psi_prime", "Phi"});
  const auto thetas = cfg.theta.empty() ? std::vector<double>{0.5, 1.0, 2.0} : cfg.theta;
  for (double t : thetas) {
    const double d = t > 0.0 ? cfg.model.psi_prime(t) : cfg.model.psi_prime_zero();
    w.row({t, cfg.model.psi(t), d, cfg.model.phi(t)});
  }
  emit(cfg, os.str());
  return 0;
}

int run_scale(const RunConfig& cfg) {
  const auto g = scale_build(cfg.model, cfg.q, cfg.x_max, cfg.step());
  std::ostringstream os;
  CsvWriter w(os, {"x", "W_q", "tilted"});
  for (std::size_t k = 0; k < g.size(); ++k) {
    const double x = std::min(static_cast<double>(k) * g.step(), g.x_max());
    w.row({x, g.values()[k], g.tilted(x)});
  }
  emit(cfg, os.str());
  return 0;
}

int run_solve(const RunConfig& cfg) {
  const auto omega = cfg.omega.build();
  omega.check_range(cfg.x_min, cfg.c_max);
  KillSolution sol;
  switch (cfg.method) {
    case SolveMethod::Auto: sol = solve(cfg.model, cfg.q, omega, cfg.x_min, cfg.c_max, cfg.step(), cfg.tol); break;
    case SolveMethod::Volterra:
      sol = solve_volterra(cfg.model, cfg.q, omega, cfg.x_min, cfg.c_max, cfg.step(), cfg.tol, cfg.depth);
      break;
    case SolveMethod::Picard: sol = solve_picard(cfg.model, cfg.q, omega, cfg.x_min, cfg.c_max, cfg.step(), cfg.tol); break;
  }
  std::ostringstream os;
  os << "# L=" << format_double(sol.L) << '\n';
  os << "# residual=" << format_double(sol.residual) << '\n';
  os << "# trunc_bound=" << format_double(sol.trunc_bound) << '\n';
  os << "# iterations=" << sol.iterations << '\n';
  CsvWriter w(os, {"x", "H"});
  for (std::size_t i = 0; i < sol.H.size(); ++i) w.row({sol.x_at(i), sol.H[i]});
  emit(cfg, os.str());
  return 0;
}

std::vector<double> series_points(const RunConfig& cfg) {
  std::vector<double> xs;
  for (int i = 0; i < cfg.points; ++i) {
    xs.push_back(cfg.points == 1 ? cfg.x_from : cfg.x_from + (cfg.x_to - cfg.x_from) * i / (cfg.points - 1));
  }
  return xs;
}

int run_series(const RunConfig& cfg) {
  std::ostringstream os;
  const auto xs = series_points(cfg);
  switch (cfg.kind) {
    case SeriesKind::Patie: {
      const PatieSeries s(cfg.model, cfg.q, cfg.alpha, cfg.gamma);
      os << "# L=" << format_double(s.L()) << '\n';
      CsvWriter w(os, {"x", "H"});
      for (double x : xs) w.row({x, s.H(x)});
      break;
    }
    case SeriesKind::Csbp: {
      const double c = cfg.c;
      if (!(c > 0.0)) throw ConfigError("c: must be > 0");
      if (cfg.x_to > -c) throw ConfigError("x_to: csbp values need x <= -c");
      const double theta = cfg.theta.empty() ? cfg.model.phi(cfg.q) + 1.0 : cfg.theta.front();
      const CsbpFunction f(cfg.model, cfg.q, cfg.gamma, c, theta);
      os << "# normalized so that H(-c) = 1\n";
      CsvWriter w(os, {"x", "H"});
      for (double x : xs) w.row({x, f.normalized(x)});
      break;
    }
    case SeriesKind::Powertail: {
      if (cfg.x_to > -cfg.c) throw ConfigError("x_to: power-tail values need x <= -c");
      std::vector<PowerTailValue> v;
      double last = 0.0;
      for (double x : xs) {
        v.push_back(powertail_terms(cfg.model, cfg.q, cfg.gamma, cfg.n, cfg.c, cfg.depth, x));
        last = std::max(last, std::abs(v.back().last_term));
      }
      os << "# max_last_term=" << format_double(last) << '\n';
      CsvWriter w(os, {"x", "H"});
      for (std::size_t i = 0; i < xs.size(); ++i) w.row({xs[i], v[i].value});
      break;
    }
  }
  emit(cfg, os.str());
  return 0;
}

int run_mc(const RunConfig& cfg) {
  PathConfig pc{cfg.model};
  pc.dt = cfg.dt;
  pc.t_max = cfg.tmax;
  pc.seed = cfg.seed;
  pc.n_paths = cfg.paths;
  pc.threads = cfg.threads;
  pc.bias_budget = cfg.bias_budget;
  const auto e = estimate_B(pc, cfg.q, cfg.omega.build(), cfg.x, cfg.c);
  std::ostringstream os;
  CsvWriter w(os, {"mean", "stderr", "n", "bias_bound"});
  w.row({e.mean, e.std_error, static_cast<double>(e.n_paths), e.horizon_bias_bound});
  emit(cfg, os.str());
  return 0;
}

int run_sell(const RunConfig& cfg) {
  const SellProblem p{cfg.model, cfg.q, cfg.alpha, cfg.gamma, cfg.z};
  const double h = cfg.step();
  if (std::log(cfg.z) < -10.0) throw ConfigError("z: must be >= e^-10");
  const double top = std::max(std::log(cfg.bmax), 10.0 * h) + 2.0 * h;
  const auto H = solve_H_halfline(p, top, h, cfg.tol);
  const auto curve = argmax_A(p, H, cfg.bmax);
  std::ostringstream os;
  CsvWriter w(os, {"b", "A"});
  for (std::size_t i = 0; i < curve.b.size(); ++i) w.row({curve.b[i], curve.A[i]});
  CsvWriter s(os, {"b_star", "A_star"});
  s.row({curve.b_star, curve.A_star});
  emit(cfg, os.str());
  if (!cfg.svg.empty()) {
    std::ofstream f(cfg.svg, std::ios::binary);
    if (!f) throw ConfigError("svg: cannot write " + cfg.svg);
    write_svg(f, curve);
  }
  return 0;
}

int run_verify_cmd(const RunConfig& cfg, const std::vector<int>& only) {
  if (cfg.list) {
    for (const auto& c : criteria()) std::cout << c.id << ' ' << c.name << ": " << c.summary << '\n';
    return 0;
  }
  VerifyOptions opt;
  opt.seed = cfg.seed;
  opt.inject_fault = cfg.inject_fault;
  opt.only = only;
  opt.threads = cfg.threads;
  const auto report = run_verify(opt, &std::cerr);
  print_table(std::cout, report);
  if (!cfg.out_dir.empty()) write_artifacts(cfg.out_dir, report);
  if (!report.all_passed()) {
    std::cout << "failed:";
    for (const auto& r : report.results) {
      if (!r.passed) std::cout << ' ' << r.name;
    }
    std::cout << '\n';
    return 3;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"First-passage probabilities for spectrally negative Levy processes with state-dependent killing"};
  app.require_subcommand(1);
  Overrides o;
  // Option storage lives in these vectors; reserve so registration never reallocates.
  o.numbers.reserve(64);
  o.integers.reserve(16);
  o.strings.reserve(16);

  auto* psi = app.add_subcommand("psi", "Laplace exponent, its derivative and inverse");
  add_model_flags(psi, o);
  psi->add_option("--theta", o.theta, "points theta >= 0");
  text(psi, o, "out", "out", "output path (default stdout)");

  auto* scale = app.add_subcommand("scale", "tabulate W^(q) on a grid");
  add_model_flags(scale, o);
  number(scale, o, "q", "q", "killing rate q >= 0");
  number(scale, o, "x-max", "x_max", "grid end");
  number(scale, o, "step", "h", "grid step (default 1e-3 x_max)");
  text(scale, o, "out", "out", "output path");

  auto* solve_cmd = app.add_subcommand("solve", "solve for H on [x_min, c_max]");
  add_model_flags(solve_cmd, o);
  solve_cmd->add_option("--omega", o.omega, "omega spec as JSON, e.g. {\"tail\":\"constant\",\"a\":0.5}");
  number(solve_cmd, o, "q", "q", "killing rate q >= 0");
  number(solve_cmd, o, "x-min", "x_min", "left end of the grid (<= 0)");
  number(solve_cmd, o, "c-max", "c_max", "right end of the grid (>= 0)");
  number(solve_cmd, o, "step", "h", "grid step (default 1e-3 (c_max - x_min))");
  number(solve_cmd, o, "tol", "tol", "fixed-point tolerance");
  text(solve_cmd, o, "method", "method", "auto, volterra or picard");
  integer(solve_cmd, o, "depth", "depth", "power-tail boundary series depth");
  text(solve_cmd, o, "out", "out", "output path");

  auto* series = app.add_subcommand("series", "closed-form H: patie, csbp or powertail");
  add_model_flags(series, o);
  text(series, o, "kind", "kind", "patie, csbp or powertail");
  number(series, o, "q", "q", "killing rate q >= 0");
  number(series, o, "gamma", "gamma", "rate scale gamma");
  number(series, o, "alpha", "alpha", "exponential rate alpha (patie)");
  number(series, o, "c", "c", "tail cut c (csbp, powertail)");
  integer(series, o, "n", "n", "power n (powertail)");
  integer(series, o, "depth", "depth", "nesting depth (powertail)");
  series->add_option("--theta", o.theta, "anchor theta > Phi(q) (csbp)");
  number(series, o, "x-from", "x_from", "first x");
  number(series, o, "x-to", "x_to", "last x");
  integer(series, o, "points", "points", "number of x values");
  text(series, o, "out", "out", "output path");

  auto* mc = app.add_subcommand("mc", "Monte Carlo estimate of the passage functional");
  add_model_flags(mc, o);
  mc->add_option("--omega", o.omega, "omega spec as JSON");
  number(mc, o, "q", "q", "killing rate q >= 0");
  number(mc, o, "x", "x", "start");
  number(mc, o, "c", "c", "level");
  integer(mc, o, "paths", "paths", "number of paths");
  mc->add_option("--seed", o.seed, "64-bit seed");
  number(mc, o, "dt", "dt", "smallest diffusive step");
  number(mc, o, "tmax", "tmax", "horizon (default 50/max(q, |psi'(0+)|, 0.02))");
  number(mc, o, "bias-budget", "bias_budget", "largest tolerated horizon bias bound");
  integer(mc, o, "threads", "threads", "worker threads (results do not depend on it)");
  text(mc, o, "out", "out", "output path");

  auto* sell = app.add_subcommand("sell", "sell-level objective A(b) and its maximiser");
  add_model_flags(sell, o);
  number(sell, o, "gamma", "gamma", "impatience rate");
  number(sell, o, "z", "z", "purchase price");
  number(sell, o, "q", "q", "discount rate");
  number(sell, o, "alpha", "alpha", "shape of omega below 0");
  number(sell, o, "bmax", "bmax", "largest sell level");
  number(sell, o, "step", "h", "grid step (default 1e-3)");
  number(sell, o, "tol", "tol", "march residual tolerance");
  text(sell, o, "svg", "svg", "also write an SVG chart of A(b) here");
  text(sell, o, "out", "out", "output path");

  auto* verify = app.add_subcommand("verify", "run the acceptance battery");
  verify->add_option("--config", o.config_path, "JSON config");
  verify->add_flag("--list", o.list, "list the criteria without running them");
  verify->add_option("--seed", o.seed, "base seed");
  verify->add_option("--only", o.only, "criterion ids to run");
  text(verify, o, "inject-fault", "inject_fault", "negative control: scale_grid");
  text(verify, o, "out-dir", "out_dir", "directory for CSV artifacts");
  integer(verify, o, "threads", "threads", "Monte Carlo worker threads");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    const auto* sub = app.get_subcommands().front();
    const auto cfg = parse_config(load(o, sub->get_name()));
    switch (cfg.subcommand) {
      case Subcommand::Psi: return run_psi(cfg);
      case Subcommand::Scale: return run_scale(cfg);
      case Subcommand::Solve: return run_solve(cfg);
      case Subcommand::Series: return run_series(cfg);
      case Subcommand::Mc: return run_mc(cfg);
      case Subcommand::Sell: return run_sell(cfg);
      case Subcommand::Verify: return run_verify_cmd(cfg, o.only.value_or(std::vector<int>{}));
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
  return 0;
}
