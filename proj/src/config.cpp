#include "passage/config.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "passage/errors.hpp"
#include "passage/expression.hpp"

namespace passage {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) { throw ConfigError(path + ": " + what); }

void only_keys(const json& j, const std::string& path, std::initializer_list<std::string_view> allowed) {
  if (!j.is_object()) fail(path, "expected an object");
  for (const auto& [key, _] : j.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      fail(path.empty() ? key : path + "." + key, "unknown key");
    }
  }
}

std::string join(const std::string& path, std::string_view key) {
  return path.empty() ? std::string(key) : path + "." + std::string(key);
}

double number(const json& j, const std::string& path) {
  if (!j.is_number()) fail(path, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) fail(path, "must be finite");
  return v;
}

long long integer(const json& j, const std::string& path) {
  if (j.is_number_integer() || j.is_number_unsigned()) return j.get<long long>();
  if (j.is_number_float()) {
    const double v = j.get<double>();
    if (std::floor(v) == v && std::abs(v) < 9e15) return static_cast<long long>(v);
  }
  fail(path, "expected an integer");
}

std::string string(const json& j, const std::string& path) {
  if (!j.is_string()) fail(path, "expected a string");
  return j.get<std::string>();
}

bool boolean(const json& j, const std::string& path) {
  if (!j.is_boolean()) fail(path, "expected true or false");
  return j.get<bool>();
}

// Optional numeric field with a predicate.
template <class Pred>
void read(const json& obj, const std::string& path, std::string_view key, double& out, Pred ok, const char* need) {
  if (!obj.contains(key)) return;
  const auto p = join(path, key);
  const double v = number(obj.at(std::string(key)), p);
  if (!ok(v)) fail(p, need);
  out = v;
}

double required(const json& obj, const std::string& path, std::string_view key) {
  if (!obj.contains(key)) fail(join(path, key), "missing");
  return number(obj.at(std::string(key)), join(path, key));
}

auto positive = [](double v) { return v > 0.0; };
auto nonnegative = [](double v) { return v >= 0.0; };
auto any = [](double) { return true; };

TailClass parse_tail(const std::string& name, const json& params, const std::string& path) {
  auto num = [&](std::string_view key) { return required(params, path, key); };
  auto check = [&](std::string_view key, double v, bool ok, const char* need) {
    if (!ok) fail(join(path, key), need);
    return v;
  };
  if (name == "zero") return TailZero{};
  if (name == "constant") {
    const double a = num("a");
    return TailConstant{check("a", a, a > 0.0, "a must be > 0")};
  }
  if (name == "exponential") {
    const double g = num("gamma"), a = num("alpha");
    check("gamma", g, g >= 0.0, "gamma must be >= 0");
    check("alpha", a, a > 0.0, "alpha must be > 0");
    return TailExponential{g, a};
  }
  if (name == "powerexp") {
    const double g = num("gamma"), a = num("alpha");
    check("gamma", g, g >= 0.0, "gamma must be >= 0");
    check("alpha", a, a > 0.0, "alpha must be > 0");
    if (!params.contains("degree")) fail(join(path, "degree"), "missing");
    const long long d = integer(params.at("degree"), join(path, "degree"));
    if (d < 0 || d > 20) fail(join(path, "degree"), "degree must be in [0, 20]");
    return TailPowerExp{g, a, static_cast<int>(d)};
  }
  if (name == "csbp") {
    const double g = num("gamma"), c = num("c");
    check("gamma", g, g > 0.0, "gamma must be > 0");
    check("c", c, c > 0.0, "c must be > 0");
    return TailCsbp{g, c};
  }
  if (name == "power") {
    const double g = num("gamma"), c = num("c");
    check("gamma", g, g >= 0.0, "gamma must be >= 0");
    check("c", c, c > 0.0, "c must be > 0");
    if (!params.contains("n")) fail(join(path, "n"), "missing");
    const long long n = integer(params.at("n"), join(path, "n"));
    if (n < 2 || n > 50) fail(join(path, "n"), "n must be in [2, 50]");
    return TailPower{g, static_cast<int>(n), c};
  }
  fail(path, "unknown tail class '" + name + "' (zero, constant, exponential, powerexp, csbp, power)");
}

}  // namespace

Subcommand subcommand_from(std::string_view name) {
  static constexpr std::pair<std::string_view, Subcommand> table[] = {
      {"psi", Subcommand::Psi},   {"scale", Subcommand::Scale}, {"solve", Subcommand::Solve},
      {"series", Subcommand::Series}, {"mc", Subcommand::Mc},   {"sell", Subcommand::Sell},
      {"verify", Subcommand::Verify}};
  for (const auto& [n, s] : table) {
    if (n == name) return s;
  }
  fail("subcommand", "unknown subcommand '" + std::string(name) + "'");
}

std::string_view subcommand_name(Subcommand s) noexcept {
  switch (s) {
    case Subcommand::Psi: return "psi";
    case Subcommand::Scale: return "scale";
    case Subcommand::Solve: return "solve";
    case Subcommand::Series: return "series";
    case Subcommand::Mc: return "mc";
    case Subcommand::Sell: return "sell";
    case Subcommand::Verify: return "verify";
  }
  return "?";
}

OmegaSpec OmegaConfig::build() const {
  if (!body) {
    if (x_tail) throw ConfigError("omega.x_tail: only meaningful together with a body");
    return OmegaSpec::pure(tail);
  }
  const Expression e = [&] {
    try {
      return Expression::parse(*body);
    } catch (const ConfigError& err) {
      throw ConfigError(std::string("omega.body: ") + err.what());
    }
  }();
  double xt = 0.0;
  if (const auto* t = std::get_if<TailCsbp>(&tail)) xt = -t->c;
  if (const auto* t = std::get_if<TailPower>(&tail)) xt = -t->c;
  try {
    return OmegaSpec([e](double x) { return e(x); }, tail, x_tail.value_or(xt));
  } catch (const ConfigError& err) {
    throw ConfigError(std::string("omega: ") + err.what());
  }
}

LevyModel parse_model(const json& j, const std::string& path) {
  if (!j.is_object()) fail(path, "expected an object");
  if (!j.contains("family")) fail(join(path, "family"), "missing");
  const std::string family = string(j.at("family"), join(path, "family"));
  try {
    if (family == "brownian") {
      only_keys(j, path, {"family", "drift", "variance"});
      double drift = 0.0, variance = 2.0;
      read(j, path, "drift", drift, any, "");
      read(j, path, "variance", variance, positive, "variance must be > 0");
      return LevyModel::brownian(drift, variance);
    }
    if (family == "cramer_lundberg") {
      only_keys(j, path, {"family", "premium", "jump_rate", "eta", "variance"});
      const double premium = required(j, path, "premium");
      const double rate = required(j, path, "jump_rate");
      const double eta = required(j, path, "eta");
      double variance = 0.0;
      read(j, path, "variance", variance, nonnegative, "variance must be >= 0");
      if (!(premium > 0.0)) fail(join(path, "premium"), "premium must be > 0");
      if (!(rate >= 0.0)) fail(join(path, "jump_rate"), "jump_rate must be >= 0");
      if (!(eta > 0.0)) fail(join(path, "eta"), "eta must be > 0");
      return LevyModel::cramer_lundberg(premium, rate, eta, variance);
    }
  } catch (const ConfigError& e) {
    const std::string what = e.what();
    if (what.rfind(path, 0) == 0) throw;
    fail(path, what);
  }
  fail(join(path, "family"), "unknown family '" + family + "' (brownian, cramer_lundberg)");
}

OmegaConfig parse_omega(const json& j, const std::string& path) {
  only_keys(j, path, {"tail", "body", "x_tail", "a", "gamma", "alpha", "degree", "c", "n"});
  OmegaConfig o;
  if (j.contains("body")) o.body = string(j.at("body"), join(path, "body"));
  if (j.contains("x_tail")) o.x_tail = number(j.at("x_tail"), join(path, "x_tail"));
  if (!j.contains("tail")) fail(join(path, "tail"), "missing");
  const json& t = j.at("tail");
  const auto tpath = join(path, "tail");
  if (t.is_string()) {
    // Flat form: {"tail": "constant", "a": 0.5}
    o.tail = parse_tail(t.get<std::string>(), j, path);
  } else if (t.is_object()) {
    // Nested form: {"tail": {"exponential": {"gamma": 1, "alpha": 1}}}
    if (t.size() != 1) fail(tpath, "expected exactly one tail class");
    for (const char* k : {"a", "gamma", "alpha", "degree", "c", "n"}) {
      if (j.contains(k)) fail(join(path, k), "tail parameters belong inside the tail object");
    }
    const auto& [name, params] = *t.items().begin();
    if (params.is_null() && name == "zero") {
      o.tail = TailZero{};
    } else {
      only_keys(params, join(tpath, name), {"a", "gamma", "alpha", "degree", "c", "n"});
      o.tail = parse_tail(name, params, join(tpath, name));
    }
  } else {
    fail(tpath, "expected a tail name or an object");
  }
  return o;
}

RunConfig parse_config(const json& doc) {
  only_keys(doc, "",
            {"subcommand", "model", "q", "omega", "x_min", "c_max", "h", "tol", "method", "depth", "theta", "x_max",
             "kind", "n", "x_from", "x_to", "points", "paths", "seed", "dt", "tmax", "x", "c", "threads", "bias_budget",
             "gamma", "alpha", "z", "bmax", "svg", "list", "inject_fault", "out_dir", "out"});
  RunConfig r;
  if (!doc.contains("subcommand")) fail("subcommand", "missing");
  r.subcommand = subcommand_from(string(doc.at("subcommand"), "subcommand"));
  if (doc.contains("model")) r.model = parse_model(doc.at("model"));
  read(doc, "", "q", r.q, nonnegative, "q must be >= 0");
  if (doc.contains("omega")) r.omega = parse_omega(doc.at("omega"));

  read(doc, "", "x_min", r.x_min, [](double v) { return v <= 0.0; }, "x_min must be <= 0");
  read(doc, "", "c_max", r.c_max, nonnegative, "c_max must be >= 0");
  read(doc, "", "h", r.h, positive, "h must be > 0");
  read(doc, "", "tol", r.tol, positive, "tol must be > 0");
  if (doc.contains("method")) {
    const auto m = string(doc.at("method"), "method");
    if (m == "auto") r.method = SolveMethod::Auto;
    else if (m == "volterra") r.method = SolveMethod::Volterra;
    else if (m == "picard") r.method = SolveMethod::Picard;
    else fail("method", "expected auto, volterra or picard");
  }
  if (doc.contains("depth")) {
    const auto d = integer(doc.at("depth"), "depth");
    if (d < 0 || d > 6) fail("depth", "depth must be in [0, 6]");
    r.depth = static_cast<int>(d);
  }
  if (doc.contains("theta")) {
    const json& t = doc.at("theta");
    r.theta.clear();
    if (t.is_array()) {
      for (std::size_t i = 0; i < t.size(); ++i) r.theta.push_back(number(t[i], "theta[" + std::to_string(i) + "]"));
    } else {
      r.theta.push_back(number(t, "theta"));
    }
    if (r.theta.empty()) fail("theta", "must not be empty");
  }
  read(doc, "", "x_max", r.x_max, positive, "x_max must be > 0");

  if (doc.contains("kind")) {
    const auto k = string(doc.at("kind"), "kind");
    if (k == "patie") r.kind = SeriesKind::Patie;
    else if (k == "csbp") r.kind = SeriesKind::Csbp;
    else if (k == "powertail") r.kind = SeriesKind::Powertail;
    else fail("kind", "expected patie, csbp or powertail");
  }
  if (doc.contains("n")) {
    const auto n = integer(doc.at("n"), "n");
    if (n < 2 || n > 50) fail("n", "n must be in [2, 50]");
    r.n = static_cast<int>(n);
  }
  read(doc, "", "x_from", r.x_from, any, "");
  read(doc, "", "x_to", r.x_to, any, "");
  if (doc.contains("points")) {
    const auto p = integer(doc.at("points"), "points");
    if (p < 1 || p > 1000000) fail("points", "points must be in [1, 1e6]");
    r.points = static_cast<int>(p);
  }

  if (doc.contains("paths")) {
    const auto p = integer(doc.at("paths"), "paths");
    if (p < 2) fail("paths", "paths must be >= 2");
    r.paths = static_cast<std::size_t>(p);
  }
  if (doc.contains("seed")) {
    const json& s = doc.at("seed");
    if (!s.is_number_unsigned() && !(s.is_number_integer() && s.get<long long>() >= 0)) {
      fail("seed", "expected a nonnegative integer");
    }
    r.seed = s.get<std::uint64_t>();
  }
  read(doc, "", "dt", r.dt, positive, "dt must be > 0");
  read(doc, "", "tmax", r.tmax, positive, "tmax must be > 0");
  read(doc, "", "x", r.x, any, "");
  read(doc, "", "c", r.c, any, "");
  if (doc.contains("threads")) {
    const auto t = integer(doc.at("threads"), "threads");
    if (t < 1 || t > 256) fail("threads", "threads must be in [1, 256]");
    r.threads = static_cast<unsigned>(t);
  }
  read(doc, "", "bias_budget", r.bias_budget, positive, "bias_budget must be > 0");

  read(doc, "", "gamma", r.gamma, nonnegative, "gamma must be >= 0");
  read(doc, "", "alpha", r.alpha, positive, "alpha must be > 0");
  read(doc, "", "z", r.z, positive, "z must be > 0");
  read(doc, "", "bmax", r.bmax, positive, "bmax must be > 0");
  if (doc.contains("svg")) r.svg = string(doc.at("svg"), "svg");
  if (doc.contains("list")) r.list = boolean(doc.at("list"), "list");
  if (doc.contains("inject_fault")) r.inject_fault = string(doc.at("inject_fault"), "inject_fault");
  if (doc.contains("out_dir")) r.out_dir = string(doc.at("out_dir"), "out_dir");
  if (doc.contains("out")) r.out = string(doc.at("out"), "out");

  // Cross-field preconditions.
  if (!(r.c_max > r.x_min)) fail("c_max", "must exceed x_min");
  if (r.subcommand == Subcommand::Solve && r.step() > (r.c_max - r.x_min) / 10.0) fail("h", "grid too coarse");
  if (r.subcommand == Subcommand::Scale && r.step() > r.x_max / 10.0) fail("h", "must be <= x_max/10");
  if (r.subcommand == Subcommand::Mc && r.x > r.c) fail("x", "must be <= c");
  if (r.subcommand == Subcommand::Sell && !(r.bmax > r.z)) fail("bmax", "must exceed z");
  if (r.subcommand == Subcommand::Series && r.x_to < r.x_from) fail("x_to", "must be >= x_from");
  if (r.subcommand == Subcommand::Psi) {
    for (std::size_t i = 0; i < r.theta.size(); ++i) {
      if (r.theta[i] < 0.0) fail("theta[" + std::to_string(i) + "]", "must be >= 0");
    }
  }
  if (r.subcommand == Subcommand::Solve || r.subcommand == Subcommand::Mc) {
    // Surfaces tail/body disagreement and parse errors before dispatch.
    (void)r.omega.build();
  }
  return r;
}

double RunConfig::step() const noexcept {
  if (h > 0.0) return h;
  switch (subcommand) {
    case Subcommand::Scale: return 1e-3 * x_max;
    case Subcommand::Sell: return 1e-3;
    default: return 1e-3 * (c_max - x_min);
  }
}

RunConfig parse_config(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: malformed JSON: ") + e.what());
  }
  return parse_config(doc);
}

}  // namespace passage
