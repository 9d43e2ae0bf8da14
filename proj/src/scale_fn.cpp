#include "passage/scale_fn.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>

#include "passage/errors.hpp"

namespace passage {
namespace {

// Real roots of a x^2 + b x + c without cancellation.
std::pair<double, double> quadratic_roots(double a, double b, double c) {
  const double disc = std::max(0.0, b * b - 4.0 * a * c);
  const double t = -0.5 * (b + std::copysign(std::sqrt(disc), b));
  if (t == 0.0) return {0.0, 0.0};
  return {t / a, c / t};
}

double poly_eval(const std::vector<double>& c, double x) {
  double v = 0.0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) v = v * x + *it;
  return v;
}

struct Root {
  double value;
  int multiplicity;
};

}  // namespace

ScaleExpansion::ScaleExpansion(const LevyModel& model, double q) : q_(q), phi_(model.phi(q)) {
  if (!(q >= 0.0)) throw DomainError("scale expansion: q must be >= 0");
  // 1/(psi - q) = N/D with coefficient vectors in increasing degree.
  std::vector<double> num;
  std::vector<double> den;
  const double s2 = model.variance();
  const double mu = model.linear_drift();
  std::vector<double> raw;
  if (model.is_brownian()) {
    num = {1.0};
    den = {-q, mu, 0.5 * s2};
  } else {
    const double lam = model.jump_rate();
    const double eta = model.jump_size_rate();
    num = {eta, 1.0};
    if (s2 == 0.0) {
      den = {-q * eta, mu * eta - lam - q, mu};
    } else {
      den = {-q * eta, mu * eta - lam - q, 0.5 * s2 * eta + mu, 0.5 * s2};
    }
  }
  const double lead = den.back();
  const double r1 = phi_;
  raw.push_back(r1);
  if (den.size() == 3) {
    if (den[0] != 0.0 && r1 != 0.0) {
      raw.push_back(den[0] / (den[2] * r1));
    } else {
      raw.push_back(-den[1] / den[2] - r1);
    }
  } else {
    // Deflate the cubic by (theta - r1).
    const double b2 = den[3];
    const double b1 = den[2] + r1 * b2;
    const double b0 = den[1] + r1 * b1;
    const auto [u, v] = quadratic_roots(b2, b1, b0);
    raw.push_back(u);
    raw.push_back(v);
  }
  std::sort(raw.begin(), raw.end(), std::greater<>());

  std::vector<Root> roots;
  for (double r : raw) {
    if (!roots.empty() && std::abs(roots.back().value - r) <= 1e-7 * (1.0 + std::abs(r))) {
      // Coincident roots only arise in the critical case; snap to the mean.
      roots.back().value = 0.5 * (roots.back().value + r);
      roots.back().multiplicity += 1;
    } else {
      roots.push_back({r, 1});
    }
  }
  if (model.critical() && q == 0.0) {
    for (auto& r : roots) {
      if (r.multiplicity == 2) r.value = 0.0;
    }
  }

  std::vector<double> dnum(num.size() > 1 ? num.size() - 1 : 1, 0.0);
  for (std::size_t k = 1; k < num.size(); ++k) dnum[k - 1] = k * num[k];

  for (std::size_t j = 0; j < roots.size(); ++j) {
    const double r = roots[j].value;
    double others = lead;
    double log_deriv = 0.0;
    for (std::size_t k = 0; k < roots.size(); ++k) {
      if (k == j) continue;
      const double d = r - roots[k].value;
      others *= std::pow(d, roots[k].multiplicity);
      log_deriv -= roots[k].multiplicity / d;
    }
    const double n_r = poly_eval(num, r);
    if (roots[j].multiplicity == 1) {
      terms_.push_back({r, n_r / others, 0.0});
    } else if (roots[j].multiplicity == 2) {
      const double f = n_r / others;
      const double df = f * (poly_eval(dnum, r) / n_r + log_deriv);
      terms_.push_back({r, df, f});
    } else {
      throw AccuracyError("scale expansion: root of multiplicity > 2");
    }
  }
}

double ScaleExpansion::operator()(double u) const {
  if (u < 0.0) return 0.0;
  double v = 0.0;
  for (const auto& t : terms_) v += (t.coeff + t.linear * u) * std::exp(t.rate * u);
  return v;
}

double ScaleExpansion::upper_laplace(double beta, double d) const {
  if (!(beta > phi_)) throw DomainError("upper_laplace: beta must exceed Phi(q)");
  double v = 0.0;
  for (const auto& t : terms_) {
    const double k = beta - t.rate;
    v += std::exp(t.rate * d) * ((t.coeff + t.linear * d) / k + t.linear / (k * k));
  }
  return v;
}

double ScaleExpansion::exp_tail_integral(double beta, double x, double y_max) const {
  if (!(beta > phi_)) throw DomainError("exp_tail_integral: beta must exceed Phi(q)");
  const double d = x - y_max;
  double v = 0.0;
  for (const auto& t : terms_) {
    const double k = beta - t.rate;
    v += std::exp(t.rate * d + beta * y_max) * ((t.coeff + t.linear * d) / k + t.linear / (k * k));
  }
  return v;
}

double talbot_scale(const LevyModel& model, double q, double x) {
  using C = std::complex<long double>;
  if (x < 0.0) return 0.0;
  if (x == 0.0) return model.bounded_variation() ? 1.0 / model.linear_drift() : 0.0;
  constexpr int M = 32;
  const long double phi = model.phi(q);
  const long double t = x;
  const long double r = 2.0L * M / (5.0L * t);
  // Shifted transform 1/(psi(phi + s) - q); analytic right of the contour.
  auto G = [&](C s) { return 1.0L / (s * model.psi_slope(phi, s)); };
  long double sum = 0.5L * std::exp(r * t) * G(C(r, 0.0L)).real();
  const long double pi = std::numbers::pi_v<long double>;
  for (int k = 1; k < M; ++k) {
    const long double th = k * pi / M;
    const long double cot = std::cos(th) / std::sin(th);
    const C s(r * th * cot, r * th);
    const long double sig = th + (th * cot - 1.0L) * cot;
    sum += (std::exp(t * s) * G(s) * C(1.0L, sig)).real();
  }
  return static_cast<double>(std::exp(phi * t) * r / M * sum);
}

ScaleGrid::ScaleGrid(const LevyModel& model, double q, double x_max, double step, std::vector<double> values)
    : model_(model), q_(q), x_max_(x_max), step_(step), values_(std::move(values)) {
  tail_slope_ = model_.phi(q_);
  const double d = model_.psi_prime_at_phi(q_);
  tail_amplitude_ = d > 0.0 ? 1.0 / d : std::numeric_limits<double>::infinity();
}

double ScaleGrid::eval(double x) const {
  if (x < 0.0) return 0.0;
  if (x > x_max_ * (1.0 + 1e-12) + 1e-300) throw RangeError("scale_eval: x beyond x_max; rebuild with a larger grid");
  const double t = x / step_;
  std::size_t k = static_cast<std::size_t>(t);
  if (k + 1 >= values_.size()) return values_.back();
  const double f = t - static_cast<double>(k);
  return values_[k] + f * (values_[k + 1] - values_[k]);
}

double ScaleGrid::tilted(double x) const {
  if (x < 0.0) throw DomainError("tilted_eval: x must be >= 0");
  return std::exp(-tail_slope_ * x) * eval(x);
}

double ScaleGrid::extended(double x) const {
  if (x <= x_max_) return eval(x);
  if (!std::isfinite(tail_amplitude_)) throw RangeError("scale tail extension undefined: infinite tail amplitude");
  return tail_amplitude_ * std::exp(tail_slope_ * x);
}

ScaleGrid scale_build(const LevyModel& model, double q, double x_max, double h, ScaleMethod method) {
  if (!(q >= 0.0) || !std::isfinite(q)) throw ConfigError("scale_build: q must be finite and >= 0");
  if (!(x_max > 0.0) || !std::isfinite(x_max)) throw ConfigError("scale_build: x_max must be > 0");
  if (!(h > 0.0)) throw ConfigError("scale_build: h must be > 0");
  if (h > x_max / 10.0 * (1.0 + 1e-12)) throw ConfigError("scale_build: grid too coarse (h > x_max/10)");
  const auto n = static_cast<std::size_t>(std::ceil(x_max / h - 1e-9));
  std::vector<double> values(n + 1);

  if (method == ScaleMethod::Auto) {
    method = (model.bounded_variation() || model.is_brownian()) ? ScaleMethod::ClosedForm : ScaleMethod::Talbot;
  }
  if (method == ScaleMethod::Talbot) {
    for (std::size_t k = 0; k <= n; ++k) values[k] = talbot_scale(model, q, k * h);
  } else if (model.is_brownian()) {
    const double s2 = model.variance();
    const double mu = model.linear_drift();
    const double delta = std::sqrt(mu * mu + 2.0 * s2 * q) / s2;
    for (std::size_t k = 0; k <= n; ++k) {
      const double u = k * h;
      values[k] = delta == 0.0 ? 2.0 / s2 * u * std::exp(-mu * u / s2)
                               : 2.0 / s2 * std::exp((delta - mu / s2) * u) * -std::expm1(-2.0 * delta * u) /
                                     (2.0 * delta);
    }
  } else {
    const ScaleExpansion w(model, q);
    for (std::size_t k = 0; k <= n; ++k) values[k] = w(k * h);
  }
  return ScaleGrid(model, q, x_max, h, std::move(values));
}

double laplace_residual(const ScaleGrid& g, double theta, double A) {
  const double phi = g.tail_slope();
  if (!(theta > phi + 0.1)) throw DomainError("laplace_residual: theta too close to Phi(q), ill-conditioned");
  if (!(A > 0.0) || A > g.x_max() * (1.0 + 1e-12)) throw RangeError("laplace_residual: need 0 < A <= x_max");
  const double h = g.step();
  const auto& w = g.values();
  const auto m = std::min(static_cast<std::size_t>(std::floor(A / h + 1e-9)), w.size() - 1);
  if (m < 3) throw ConfigError("laplace_residual: fewer than three grid intervals below A");
  auto f = [&](std::size_t k) { return static_cast<long double>(std::exp(-theta * k * h) * w[k]); };

  long double s = 0.0L;
  const std::size_t simpson_end = (m % 2 == 0) ? m : m - 3;
  for (std::size_t k = 0; k + 2 <= simpson_end; k += 2) s += (f(k) + 4.0L * f(k + 1) + f(k + 2)) * h / 3.0L;
  if (simpson_end != m) {
    const std::size_t k = simpson_end;
    s += 3.0L * h / 8.0L * (f(k) + 3.0L * f(k + 1) + 3.0L * f(k + 2) + f(k + 3));
  }
  // Partial last interval, exact for the linear interpolant (2-point Gauss).
  const double a = m * h;
  if (A > a) {
    const double half = 0.5 * (A - a);
    const double node = half / std::sqrt(3.0);
    for (double y : {a + half - node, a + half + node}) s += half * std::exp(-theta * y) * g.eval(y);
  }

  const double target = 1.0 / ((theta - phi) * g.model().psi_slope(phi, theta - phi));
  // Neglected tail: W(x) <= amp e^{phi x}, and W(x) <= t e^{t x}/(psi(t)-q) for any t > phi.
  double tail = std::numeric_limits<double>::infinity();
  if (std::isfinite(g.tail_amplitude())) {
    tail = g.tail_amplitude() * std::exp(-(theta - phi) * A) / (theta - phi);
  }
  auto log_bound = [&](double t) {
    return std::log(t) - std::log((t - phi) * g.model().psi_slope(phi, t - phi)) - (theta - t) * A -
           std::log(theta - t);
  };
  double lo = phi + 1e-9 * (theta - phi);
  double hi = theta - 1e-9 * (theta - phi);
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = hi - gr * (hi - lo);
  double d = lo + gr * (hi - lo);
  for (int it = 0; it < 200; ++it) {
    if (log_bound(c) < log_bound(d)) hi = d; else lo = c;
    c = hi - gr * (hi - lo);
    d = lo + gr * (hi - lo);
  }
  tail = std::min(tail, std::exp(log_bound(0.5 * (lo + hi))));

  const double S = static_cast<double>(s);
  return std::max(std::abs(S - target), std::abs(S + tail - target));
}

}  // namespace passage
