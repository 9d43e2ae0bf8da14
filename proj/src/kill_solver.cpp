#include "passage/kill_solver.hpp"

#include <algorithm>
#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <limits>
#include <memory>
#include <optional>
#include <sstream>

#include "passage/closed_forms.hpp"
#include "passage/errors.hpp"
#include "passage/scale_fn.hpp"

namespace passage {

double quadrature_weight(std::size_t n, std::size_t j) noexcept {
  static constexpr double simpson[] = {1.0 / 3.0, 4.0 / 3.0, 1.0 / 3.0};
  static constexpr double three_eighths[] = {3.0 / 8.0, 9.0 / 8.0, 9.0 / 8.0, 3.0 / 8.0};
  static constexpr double boole[] = {14.0 / 45.0, 64.0 / 45.0, 24.0 / 45.0, 64.0 / 45.0, 14.0 / 45.0};
  static constexpr double gregory[] = {3.0 / 8.0, 7.0 / 6.0, 23.0 / 24.0};
  switch (n) {
    case 0: return 0.0;
    case 1: return 0.5;
    case 2: return simpson[j];
    case 3: return three_eighths[j];
    case 4: return boole[j];
    default: break;
  }
  const std::size_t e = std::min(j, n - j);
  return e < 3 ? gregory[e] : 1.0;
}

std::size_t KillSolution::zero_index() const noexcept {
  return static_cast<std::size_t>(std::llround(-x_min / step));
}

double KillSolution::at(double x) const {
  const double t = (x - x_min) / step;
  const double last = static_cast<double>(H.size() - 1);
  if (t < -1e-9 || t > last + 1e-9) {
    std::ostringstream os;
    os.precision(17);
    os << "KillSolution: x=" << x << " outside [" << x_min << ", " << x_max() << "]";
    throw RangeError(os.str());
  }
  // Node queries return the stored value exactly.
  const double snapped = std::round(t);
  const double tc = std::clamp(std::abs(t - snapped) < 1e-9 ? snapped : t, 0.0, last);
  auto i = static_cast<std::size_t>(tc);
  if (i >= H.size() - 1) return H.back();
  const double f = tc - static_cast<double>(i);
  if (f == 0.0) return H[i];
  return std::exp((1.0 - f) * std::log(H[i]) + f * std::log(H[i + 1]));
}

double passage_prob(const KillSolution& sol, double x, double c) {
  if (x > c) throw ArgumentError("passage_prob: x must be <= c");
  if (x < sol.x_min - 1e-9 * sol.step || c > sol.x_max() + 1e-9 * sol.step) {
    throw RangeError("passage_prob: arguments outside the solved grid");
  }
  if (x == c) return 1.0;
  return sol.at(x) / sol.at(c);
}

double trunc_bound(const LevyModel& model, double q, double gamma, double alpha, int n, double x) {
  if (n < 0) throw DomainError("trunc_bound: n must be >= 0");
  if (!(alpha > 0.0)) throw DomainError("trunc_bound: alpha must be > 0");
  if (!(gamma >= 0.0)) throw DomainError("trunc_bound: gamma must be >= 0");
  if (gamma == 0.0) return 0.0;
  const double phi = model.phi(q);
  const double lg = std::log(gamma);
  const double stop = std::log(1e-16);
  double log_prod = 0.0;
  double m = -std::numeric_limits<double>::infinity();
  double s = 0.0;
  double prev_ratio = std::numeric_limits<double>::infinity();
  int growing = 0;
  for (long k = 1; k < 10'000'000; ++k) {
    const double step = k * alpha;
    const double log_den = std::log(step * model.psi_slope(phi, step));
    log_prod += log_den;
    const double log_ratio = lg + alpha * x - log_den;
    if (log_ratio >= 0.0 && log_ratio >= prev_ratio) {
      if (++growing >= 10) throw AccuracyError("trunc_bound: series diverges (ratio test)");
    } else {
      growing = 0;
    }
    prev_ratio = log_ratio;
    if (k <= n) continue;
    const double t = k * lg + (phi + alpha * k) * x - log_prod;
    if (t > m) {
      s = s * std::exp(m - t) + 1.0;
      m = t;
    } else {
      s += std::exp(t - m);
    }
    if (log_ratio < 0.0 && t - (m + std::log(s)) < stop) {
      const double v = std::exp(m + std::log(s));
      if (!std::isfinite(v)) throw AccuracyError("trunc_bound: tail sum overflows");
      return v;
    }
  }
  throw AccuracyError("trunc_bound: series did not converge");
}

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

struct Grid {
  double x_min;
  double h;
  std::size_t n;
  std::size_t zero;
  double x(std::size_t i) const { return x_min + static_cast<double>(i) * h; }
};

Grid make_grid(double x_min, double c_max, double h) {
  if (!(h > 0.0) || !std::isfinite(h)) throw ConfigError("solver: h must be > 0");
  if (!(x_min <= 0.0) || !(c_max >= 0.0) || !std::isfinite(x_min) || !std::isfinite(c_max)) {
    throw ConfigError("solver: need x_min <= 0 <= c_max");
  }
  const auto k_neg = static_cast<std::size_t>(std::ceil(-x_min / h - 1e-9));
  const auto k_pos = static_cast<std::size_t>(std::ceil(c_max / h - 1e-9));
  const std::size_t n = k_neg + k_pos + 1;
  if (n < 11) throw ConfigError("solver: grid needs at least 11 nodes");
  if (n > 400001) throw ConfigError("solver: grid exceeds 400001 nodes");
  return {-static_cast<double>(k_neg) * h, h, n, k_neg};
}

// sum_{j=a}^{b} f[j] W[i-j], four independent accumulators in fixed order.
double dot_reversed(const double* f, const double* w, std::size_t i, std::size_t a, std::size_t b) {
  if (a > b) return 0.0;
  double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
  std::size_t j = a;
  for (; j + 3 <= b; j += 4) {
    s0 += f[j] * w[i - j];
    s1 += f[j + 1] * w[i - j - 1];
    s2 += f[j + 2] * w[i - j - 2];
    s3 += f[j + 3] * w[i - j - 3];
  }
  for (; j <= b; ++j) s0 += f[j] * w[i - j];
  return (s0 + s1) + (s2 + s3);
}

// h * sum_{j<=upto} w(i,j) f_j W_{i-j}, with upto = i or i-1.
double convolve(const std::vector<double>& f, const std::vector<double>& w, std::size_t i, double h, bool diag) {
  if (i == 0) return 0.0;
  const std::size_t upto = diag ? i : i - 1;
  if (i < 8) {
    double s = 0.0;
    for (std::size_t j = 0; j <= upto; ++j) s += quadrature_weight(i, j) * f[j] * w[i - j];
    return h * s;
  }
  double s = dot_reversed(f.data(), w.data(), i, 3, i - 3);
  for (std::size_t j : {std::size_t{0}, std::size_t{1}, std::size_t{2}, i - 2, i - 1, i}) {
    if (j > upto) continue;
    s += quadrature_weight(i, j) * f[j] * w[i - j];
  }
  return h * s;
}

double sup_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

// int_{-inf}^{x_min} omega(y) e^{kappa (y - x_min)} {1, y} dy.
std::pair<double, double> omega_moments(const OmegaSpec& omega, double kappa, double x_min) {
  using boost::math::quadrature::gauss_kronrod;
  double m0 = 0.0, m1 = 0.0;
  const double xt = omega.x_tail();
  const double b = std::min(xt, x_min);
  if (x_min > xt) {
    auto f0 = [&](double y) { return omega.body()(y) * std::exp(kappa * (y - x_min)); };
    auto f1 = [&](double y) { return y * omega.body()(y) * std::exp(kappa * (y - x_min)); };
    m0 += gauss_kronrod<double, 31>::integrate(f0, xt, x_min, 15, 1e-13);
    m1 += gauss_kronrod<double, 31>::integrate(f1, xt, x_min, 15, 1e-13);
  }
  std::visit(overloaded{[](const TailZero&) {},
                        [&](const TailExponential& e) {
                          const double beta = e.alpha + kappa;
                          const double base = e.gamma * std::exp(beta * b - kappa * x_min);
                          m0 += base / beta;
                          m1 += base * (b / beta - 1.0 / (beta * beta));
                        },
                        [&](const auto& t) {
                          const TailClass tc = t;
                          boost::math::quadrature::exp_sinh<double> integrator;
                          auto f0 = [&](double s) { return tail_value(tc, b - s) * std::exp(kappa * (b - s - x_min)); };
                          auto f1 = [&](double s) {
                            return (b - s) * tail_value(tc, b - s) * std::exp(kappa * (b - s - x_min));
                          };
                          m0 += integrator.integrate(f0, 1e-13);
                          m1 += integrator.integrate(f1, 1e-13);
                        }},
             omega.tail_class());
  return {m0, m1};
}

// Vector-valued integral over s in [0, inf) by 8-point Gauss-Legendre panels,
// stopping once a panel adds less than 1e-17 of the running total.
template <class F>
std::vector<double> panel_integrate(F f, std::size_t dim, double width, double s_cap) {
  using GL = boost::math::quadrature::gauss<double, 8>;
  const auto& nodes = GL::abscissa();
  const auto& weights = GL::weights();
  std::vector<double> total(dim, 0.0);
  std::vector<double> panel(dim);
  std::vector<double> val(dim);
  for (double a = 0.0; a < s_cap; a += width) {
    std::fill(panel.begin(), panel.end(), 0.0);
    const double half = 0.5 * width;
    const double mid = a + half;
    auto add = [&](double s, double wgt) {
      f(s, val);
      for (std::size_t j = 0; j < dim; ++j) panel[j] += wgt * half * val[j];
    };
    // boost stores nonnegative abscissae only; the 8-point rule has no centre node.
    for (std::size_t k = 0; k < nodes.size(); ++k) {
      add(mid - half * nodes[k], weights[k]);
      if (nodes[k] != 0.0) add(mid + half * nodes[k], weights[k]);
    }
    bool small = true;
    for (std::size_t j = 0; j < dim; ++j) {
      total[j] += panel[j];
      if (std::abs(panel[j]) > 1e-17 * std::abs(total[j])) small = false;
    }
    if (small && a > 0.0) return total;
  }
  throw AccuracyError("tail moment integral did not converge");
}

struct Setup {
  Grid grid;
  std::vector<double> W;
  std::vector<double> omega;
  std::vector<double> forcing;
  ScaleExpansion expansion;
  double phi;
};

Setup prepare(const LevyModel& model, double q, const OmegaSpec& omega, double x_min, double c_max, double h,
              double tol, bool with_forcing) {
  if (!(q >= 0.0) || !std::isfinite(q)) throw ConfigError("solver: q must be finite and >= 0");
  if (!(tol > 0.0)) throw ConfigError("solver: tol must be > 0");
  const Grid g = make_grid(x_min, c_max, h);
  omega.check_range(g.x(0), g.x(g.n - 1), static_cast<int>(std::min<std::size_t>(g.n * 2, 1 << 16)));
  const ScaleGrid sg = scale_build(model, q, static_cast<double>(g.n - 1) * h, h);
  Setup s{g, {}, {}, {}, ScaleExpansion(model, q), model.phi(q)};
  s.W.assign(sg.values().begin(), sg.values().begin() + static_cast<std::ptrdiff_t>(g.n));
  s.omega.resize(g.n);
  s.forcing.assign(g.n, 0.0);
  for (std::size_t i = 0; i < g.n; ++i) {
    s.omega[i] = omega(g.x(i));
    if (!std::isfinite(s.omega[i]) || s.omega[i] < 0.0) throw DomainError("omega is negative or not finite on the grid");
    if (with_forcing) s.forcing[i] = std::exp(s.phi * g.x(i));
  }
  return s;
}

// a_k gamma^{k+1} int_{-inf}^{x_min} e^{(Phi + alpha(k+1)) y} W(x_i - y) dy
std::vector<double> exponential_tail_term(const Setup& s, const PatieSeries& series, std::size_t k) {
  const auto& g = s.grid;
  const double gamma = series.gamma();
  const double log_c = series.log_coefficients()[k] + static_cast<double>(k + 1) * std::log(gamma);
  const double beta = s.phi + series.alpha() * static_cast<double>(k + 1);
  std::vector<double> out(g.n);
  for (std::size_t i = 0; i < g.n; ++i) {
    out[i] = std::exp(log_c) * s.expansion.exp_tail_integral(beta, g.x(i), g.x(0));
  }
  return out;
}

// int_{-inf}^{x_min} omega(y) e^{Phi y} W(x_i - y) dy
std::vector<double> envelope_tail(const Setup& s, const OmegaSpec& omega) {
  const auto& g = s.grid;
  const double x0 = g.x(0);
  std::vector<double> out(g.n, 0.0);
  for (const auto& t : s.expansion.terms()) {
    const auto [m0, m1] = omega_moments(omega, s.phi - t.rate, x0);
    for (std::size_t i = 0; i < g.n; ++i) {
      const double x = g.x(i);
      out[i] += std::exp(t.rate * (x - x0) + s.phi * x0) * ((t.coeff + t.linear * x) * m0 - t.linear * m1);
    }
  }
  return out;
}

// sum_j A_j e^{r_j (x_i - x_min)} M_j, M_j = int_0^inf integrand(s)_j ds with y = x_min e^s.
template <class F>
std::vector<double> substituted_tail(const Setup& s, F integrand) {
  const auto& g = s.grid;
  const auto terms = s.expansion.terms();
  for (const auto& t : terms) {
    if (t.linear != 0.0) throw UnsupportedError("tail boundary undefined in the critical case");
  }
  const auto M = panel_integrate(integrand, terms.size(), 0.25, 4000.0);
  std::vector<double> out(g.n, 0.0);
  for (std::size_t j = 0; j < terms.size(); ++j) {
    for (std::size_t i = 0; i < g.n; ++i) {
      out[i] += terms[j].coeff * std::exp(terms[j].rate * (g.x(i) - g.x(0))) * M[j];
    }
  }
  return out;
}

double defect(const Setup& s, const std::vector<double>& H, const std::vector<double>& tail) {
  std::vector<double> f(H.size());
  for (std::size_t i = 0; i < H.size(); ++i) f[i] = s.omega[i] * H[i];
  double d = 0.0;
  for (std::size_t i = 0; i < H.size(); ++i) {
    const double r = H[i] - s.forcing[i] - tail[i] - convolve(f, s.W, i, s.grid.h, true);
    d = std::max(d, std::abs(r));
  }
  return d / sup_abs(H);
}

KillSolution finish(const Setup& s, double q, std::vector<double> H, bool homogeneous) {
  KillSolution sol;
  sol.q = q;
  sol.phi = s.phi;
  sol.x_min = s.grid.x_min;
  sol.step = s.grid.h;
  const double h0 = H[s.grid.zero];
  if (!(h0 > 0.0) || !std::isfinite(h0)) throw AccuracyError("solver produced a non-positive H(0)");
  for (double& v : H) v /= h0;
  for (double v : H) {
    if (!(v > 0.0) || !std::isfinite(v)) throw AccuracyError("solver produced a non-positive or non-finite H value");
  }
  sol.H = std::move(H);
  sol.L = homogeneous ? 0.0 : 1.0 / h0;
  return sol;
}

// omega <= gamma e^{alpha y} on the grid and on the declared tail.
std::pair<double, double> exponential_envelope(const Setup& s, const OmegaSpec& omega) {
  double alpha = 1.0;
  double gamma = 0.0;
  std::visit(overloaded{[&](const TailExponential& e) {
                          alpha = e.alpha;
                          gamma = e.gamma;
                        },
                        [&](const TailPowerExp& e) {
                          alpha = 0.5 * e.alpha;
                          // max over y <= x_tail of |y|^d e^{alpha y / 2}
                          const double y_star = -2.0 * e.degree / e.alpha;
                          const double y = std::min(y_star, omega.x_tail());
                          gamma = e.gamma * std::pow(std::abs(y), e.degree) * std::exp(alpha * y);
                        },
                        [](const auto&) {}},
             omega.tail_class());
  for (std::size_t i = 0; i < s.grid.n; ++i) {
    gamma = std::max(gamma, s.omega[i] * std::exp(-alpha * s.grid.x(i)));
  }
  return {gamma, alpha};
}

}  // namespace

KillSolution solve_picard(const LevyModel& model, double q, const OmegaSpec& omega, double x_min, double c_max,
                          double h, double tol, PicardTrace* trace, const PicardOptions& opt) {
  const auto& tc = omega.tail_class();
  if (!std::holds_alternative<TailZero>(tc) && !std::holds_alternative<TailExponential>(tc) &&
      !std::holds_alternative<TailPowerExp>(tc)) {
    throw UnsupportedError("solve_picard: tail class " + tail_name(tc) +
                           " is not Phi(q)-subexponential; use solve_volterra");
  }
  Setup s = prepare(model, q, omega, x_min, c_max, h, tol, true);
  const auto& g = s.grid;

  const bool all_zero = std::all_of(s.omega.begin(), s.omega.end(), [](double v) { return v == 0.0; });
  if (all_zero && std::holds_alternative<TailZero>(tc)) {
    // No killing: H = e^{Phi x}, and H = 1 in the critical case.
    KillSolution sol = finish(s, q, s.forcing, false);
    if (trace) trace->predicted_iterations = 0;
    return sol;
  }

  const auto [g_env, a_env] = exponential_envelope(s, omega);
  const double c_top = g.x(g.n - 1);
  int n_env = -1;
  for (int n = 0; n <= 5000; ++n) {
    if (trunc_bound(model, q, g_env, a_env, n, c_top) <= tol * std::exp(s.phi * c_top)) {
      n_env = n;
      break;
    }
  }
  if (n_env < 0) throw AccuracyError("solve_picard: tolerance unreachable within 5000 iterations per trunc_bound");
  const int max_iter = 10 * std::max(1, n_env);
  if (trace) trace->predicted_iterations = n_env;

  // Exact iterate tails when omega is exponential all the way below x_min.
  const auto* exp_tail = std::get_if<TailExponential>(&tc);
  const bool exact_tail = (exp_tail && g.x(0) <= omega.x_tail()) ||
                          (std::holds_alternative<TailZero>(tc) && g.x(0) <= omega.x_tail());
  std::optional<PatieSeries> series;
  if (exp_tail && exact_tail && exp_tail->gamma > 0.0) series.emplace(model, q, exp_tail->alpha, exp_tail->gamma);
  std::vector<double> envelope;
  if (!exact_tail) envelope = envelope_tail(s, omega);

  std::vector<double> tail(g.n, 0.0);
  std::size_t tail_terms = 0;
  auto extend_tail = [&](std::size_t upto) {
    // Adds Patie terms k < upto; tiny terms are still added so iterates stay exact.
    while (series && tail_terms < upto && tail_terms < PatieSeries::kMaxTerms) {
      const auto t = exponential_tail_term(s, *series, tail_terms++);
      for (std::size_t i = 0; i < g.n; ++i) tail[i] += t[i];
    }
  };
  double slack = 0.0;
  auto set_envelope = [&](const std::vector<double>& H) {
    const double m = std::max(1.0, std::exp(-s.phi * g.x(0)) * H[0]);
    for (std::size_t i = 0; i < g.n; ++i) tail[i] = 0.5 * (1.0 + m) * envelope[i];
    slack = 0.5 * (m - 1.0) * sup_abs(envelope);
  };

  std::vector<double> H = s.forcing;
  std::vector<double> next(g.n);
  std::vector<double> f(g.n);
  if (trace && opt.keep_iterates) trace->iterates.push_back(H);
  int it = 0;
  bool converged = false;
  while (it < max_iter) {
    ++it;
    if (exact_tail) extend_tail(static_cast<std::size_t>(it)); else set_envelope(H);
    for (std::size_t i = 0; i < g.n; ++i) f[i] = s.omega[i] * H[i];
    for (std::size_t i = 0; i < g.n; ++i) next[i] = s.forcing[i] + tail[i] + convolve(f, s.W, i, g.h, true);
    double change = 0.0;
    for (std::size_t i = 0; i < g.n; ++i) change = std::max(change, std::abs(next[i] - H[i]));
    H.swap(next);
    if (trace && opt.keep_iterates) trace->iterates.push_back(H);
    if (change <= tol * sup_abs(H)) {
      converged = true;
      break;
    }
  }
  if (!converged) throw AccuracyError("solve_picard: no convergence within the iteration cap");
  if (exact_tail) extend_tail(static_cast<std::size_t>(it) + 1); else set_envelope(H);

  const double scale = sup_abs(H);
  const double res = defect(s, H, tail);
  double bound = 0.0;
  if (exp_tail && exact_tail) bound = trunc_bound(model, q, g_env, a_env, it, c_top) / scale;
  bound += slack / scale;

  KillSolution sol = finish(s, q, std::move(H), false);
  sol.residual = res;
  sol.trunc_bound = bound;
  sol.iterations = it;
  return sol;
}

KillSolution solve_volterra(const LevyModel& model, double q, const OmegaSpec& omega, double x_min, double c_max,
                            double h, double tol, int powertail_depth) {
  const auto& tc = omega.tail_class();
  const bool homogeneous = std::holds_alternative<TailConstant>(tc) || std::holds_alternative<TailCsbp>(tc);
  if (std::holds_alternative<TailPowerExp>(tc)) {
    throw UnsupportedError("solve_volterra: no exact boundary for power-times-exponential tails; use solve_picard");
  }
  Setup s = prepare(model, q, omega, x_min, c_max, h, tol, !homogeneous);
  const auto& g = s.grid;
  if (g.x(0) > omega.x_tail() + 1e-12) throw ConfigError("solve_volterra: need x_min <= x_tail");
  const double x0 = g.x(0);

  std::vector<double> tail(g.n, 0.0);
  double bound = 0.0;
  std::visit(
      overloaded{
          [](const TailZero&) {},
          [&](const TailConstant& c) {
            const double beta = model.phi(q + c.a);
            for (std::size_t i = 0; i < g.n; ++i) tail[i] = c.a * s.expansion.exp_tail_integral(beta, g.x(i), x0);
          },
          [&](const TailExponential& e) {
            if (e.gamma == 0.0) return;
            const PatieSeries series(model, q, e.alpha, e.gamma);
            double prev = std::numeric_limits<double>::infinity();
            for (std::size_t k = 0; k < PatieSeries::kMaxTerms; ++k) {
              const auto t = exponential_tail_term(s, series, k);
              for (std::size_t i = 0; i < g.n; ++i) tail[i] += t[i];
              const double mt = sup_abs(t);
              if (mt < prev && mt <= 1e-17 * sup_abs(tail)) return;
              prev = mt;
            }
            throw AccuracyError("solve_volterra: exponential tail series did not converge");
          },
          [&](const TailCsbp& c) {
            if (q == 0.0 && model.critical()) throw UnsupportedError("csbp tail in the critical case");
            const CsbpFunction csbp(model, q, c.gamma, c.c, s.phi + 1.0);
            const double ref = csbp.log_value(x0);
            const auto terms = s.expansion.terms();
            tail = substituted_tail(s, [&](double u, std::vector<double>& out) {
              const double y = x0 * std::exp(u);
              const double base = c.gamma * std::exp(csbp.log_value(y) - ref);
              for (std::size_t j = 0; j < terms.size(); ++j) out[j] = base * std::exp(-terms[j].rate * (y - x0));
            });
          },
          [&](const TailPower& p) {
            if (q == 0.0 && model.critical()) throw UnsupportedError("power tail in the critical case");
            const auto terms = s.expansion.terms();
            tail = substituted_tail(s, [&](double u, std::vector<double>& out) {
              const double y = x0 * std::exp(u);
              const auto v = powertail_terms(model, q, p.gamma, p.n, p.c, powertail_depth, y);
              const double base = p.gamma * std::pow(std::abs(y), 1 - p.n) * v.scaled * std::exp(s.phi * x0);
              for (std::size_t j = 0; j < terms.size(); ++j) {
                out[j] = base * std::exp((s.phi - terms[j].rate) * (y - x0));
              }
            });
            const auto edge = powertail_terms(model, q, p.gamma, p.n, p.c, powertail_depth, x0);
            bound = edge.last_term / edge.value;
          },
          [](const TailPowerExp&) {}},
      tc);

  std::vector<double> H(g.n);
  std::vector<double> f(g.n, 0.0);
  for (std::size_t i = 0; i < g.n; ++i) {
    const double rhs = s.forcing[i] + tail[i] + convolve(f, s.W, i, g.h, false);
    const double diag = i == 0 ? 0.0 : g.h * quadrature_weight(i, i) * s.omega[i] * s.W[0];
    if (diag >= 1.0) throw StepSizeError("solve_volterra: diagonal weight >= 1; reduce h");
    H[i] = rhs / (1.0 - diag);
    f[i] = s.omega[i] * H[i];
  }
  const double res = defect(s, H, tail);
  KillSolution sol = finish(s, q, std::move(H), homogeneous);
  sol.residual = res;
  sol.trunc_bound = bound;
  sol.iterations = 1;
  return sol;
}

KillSolution solve(const LevyModel& model, double q, const OmegaSpec& omega, double x_min, double c_max, double h,
                   double tol) {
  const auto& tc = omega.tail_class();
  const bool volterra = std::holds_alternative<TailConstant>(tc) || std::holds_alternative<TailCsbp>(tc) ||
                        std::holds_alternative<TailPower>(tc) ||
                        (std::holds_alternative<TailExponential>(tc) && x_min <= omega.x_tail());
  return volterra ? solve_volterra(model, q, omega, x_min, c_max, h, tol)
                  : solve_picard(model, q, omega, x_min, c_max, h, tol);
}

Mixture mixture_build(const std::vector<MixtureAtom>& atoms, const LevyModel& model, double q) {
  if (atoms.empty()) throw ConfigError("mixture: need at least one atom");
  double total = 0.0;
  for (const auto& a : atoms) {
    if (!(a.alpha > 0.0) || !(a.weight > 0.0)) throw ConfigError("mixture: alpha and weight must be > 0");
    total += a.weight;
  }
  if (std::abs(total - 1.0) > 1e-12) throw ConfigError("mixture: weights must sum to 1");
  auto series = std::make_shared<std::vector<PatieSeries>>();
  double L = 0.0;
  double alpha_min = std::numeric_limits<double>::infinity();
  for (const auto& a : atoms) {
    series->emplace_back(model, q, a.alpha, 1.0);
    L += a.weight * series->back().L();
    alpha_min = std::min(alpha_min, a.alpha);
  }
  // As x -> -inf each H_alpha ~ L_alpha e^{Phi x}, so omega ~ gamma' e^{alpha_min x}.
  double lead = 0.0;
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    if (atoms[i].alpha == alpha_min) lead += atoms[i].weight * (*series)[i].L();
  }
  const double gamma_tail = lead / L;
  auto H = [atoms, series](double x) {
    double v = 0.0;
    for (std::size_t i = 0; i < atoms.size(); ++i) v += atoms[i].weight * (*series)[i].H(x);
    return v;
  };
  auto body = [atoms, series](double x) {
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < atoms.size(); ++i) {
      const double hx = atoms[i].weight * (*series)[i].H(x);
      num += hx * std::exp(atoms[i].alpha * x);
      den += hx;
    }
    return num / den;
  };
  constexpr double x_tail = -40.0;
  // Below x_tail the relative gap between the ratio and its exponential asymptote is negligible.
  return {OmegaSpec(body, TailExponential{gamma_tail, alpha_min}, x_tail), H, L};
}

}  // namespace passage
