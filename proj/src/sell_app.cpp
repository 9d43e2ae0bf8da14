#include "passage/sell_app.hpp"

#include <algorithm>
#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <ostream>

#include "passage/errors.hpp"

namespace passage {

OmegaSpec sell_omega(const SellProblem& p) {
  const double g = p.gamma;
  const double a = p.alpha;
  return OmegaSpec([g, a](double x) { return g * std::min(std::exp(a * x), 1.0); }, TailExponential{g, a}, 0.0);
}

Forcing::Forcing(const SellProblem& p) : p_(p), patie_(p.model, p.q, p.alpha, p.gamma), W_(p.model, p.q) {
  if (!(p.alpha > 0.0)) throw ConfigError("sell: alpha must be > 0");
  if (!(p.gamma >= 0.0)) throw ConfigError("sell: gamma must be >= 0");
  if (!(p.z > 0.0)) throw ConfigError("sell: z must be > 0");
  if (p.gamma == 0.0) return;
  // e^{alpha y} P(y) = sum_k tail_coeff_[k] e^{(Phi + alpha (k+1)) y}
  const double log_norm = patie_.log_unnormalized(0.0);
  const double lg = std::log(p.gamma);
  const auto& la = patie_.log_coefficients();
  for (std::size_t k = 0; k < la.size(); ++k) {
    const double lc = la[k] + static_cast<double>(k) * lg - log_norm;
    const double beta = patie_.phi() + p.alpha * static_cast<double>(k + 1);
    tail_coeff_.push_back(std::exp(lc));
    // Contribution is below e^{-80} relative to an O(1) forcing.
    if (lc + beta * cut < -80.0) break;
  }
}

double Forcing::operator()(double x) const {
  if (x < 0.0) throw DomainError("forcing: x must be >= 0");
  const double phi = patie_.phi();
  double v = patie_.L() * std::exp(phi * x);
  if (p_.gamma == 0.0) return v;
  auto f = [&](double y) { return std::exp(p_.alpha * y) * patie_.H(y) * W_(x - y); };
  double err = 0.0;
  const double body = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, cut, 0.0, 15, 1e-13, &err);
  if (!std::isfinite(body) || err > 1e-9 * std::abs(body) + 1e-300) throw AccuracyError("forcing: quadrature did not converge");
  double tail = 0.0;
  for (std::size_t k = 0; k < tail_coeff_.size(); ++k) {
    tail += tail_coeff_[k] * W_.exp_tail_integral(phi + p_.alpha * static_cast<double>(k + 1), x, cut);
  }
  return v + p_.gamma * (body + tail);
}

double h_eval(const SellProblem& p, double x) { return Forcing(p)(x); }

double b_gamma(double gamma) {
  if (!(gamma >= 0.0)) throw DomainError("b_gamma: gamma must be >= 0");
  if (gamma == 0.0) return 0.0;
  double t = 1.0;
  double num = 0.0;
  double den = 0.0;
  for (int k = 0; k < 10000; ++k) {
    num += t / (k + 1);
    den += t;
    if (t < 1e-17 * den) break;
    t *= gamma / ((k + 1.0) * (k + 1.0));
  }
  return gamma * num / den;
}

KillSolution solve_H_halfline(const SellProblem& p, double x_max, double h_step, double tol) {
  if (!(x_max > 0.0) || !(h_step > 0.0) || h_step > x_max / 10.0) {
    throw ConfigError("solve_H_halfline: need x_max > 0 and 0 < h <= x_max/10");
  }
  const Forcing h(p);
  const auto n = static_cast<std::size_t>(std::ceil(x_max / h_step - 1e-9));
  const auto m = static_cast<std::size_t>(std::ceil(10.0 / h_step - 1e-9));
  const double step = h_step;
  std::vector<double> W(n + 1);
  for (std::size_t k = 0; k <= n; ++k) W[k] = h.kernel()(static_cast<double>(k) * step);
  std::vector<double> f(n + 1);
  for (std::size_t k = 0; k <= n; ++k) f[k] = h(static_cast<double>(k) * step);

  // sum_{j<i} w(i,j) H_j W_{i-j} with the end-corrected weights.
  auto history = [&](const std::vector<double>& H, std::size_t i) {
    double s = 0.0;
    if (i <= 8) {
      for (std::size_t j = 0; j < i; ++j) s += quadrature_weight(i, j) * H[j] * W[i - j];
      return s;
    }
    for (std::size_t j = 0; j < 3; ++j) s += quadrature_weight(i, j) * H[j] * W[i - j];
    for (std::size_t j = i - 2; j < i; ++j) s += quadrature_weight(i, j) * H[j] * W[i - j];
    double a0 = 0.0, a1 = 0.0;
    std::size_t j = 3;
    for (; j + 1 < i - 2; j += 2) {
      a0 += H[j] * W[i - j];
      a1 += H[j + 1] * W[i - j - 1];
    }
    for (; j < i - 2; ++j) a0 += H[j] * W[i - j];
    return s + a0 + a1;
  };

  const double g = p.gamma;
  std::vector<double> H(n + 1);
  // h(0) = P(0) = 1 exactly; pinning it keeps the glue at 0 exact.
  H[0] = 1.0;
  for (std::size_t i = 1; i <= n; ++i) {
    const double diag = g * step * quadrature_weight(i, i) * W[0];
    if (diag >= 1.0) throw StepSizeError("solve_H_halfline: diagonal weight >= 1, reduce the step");
    H[i] = (f[i] + g * step * history(H, i)) / (1.0 - diag);
  }
  double defect = 0.0;
  double sup = 0.0;
  for (std::size_t i = 0; i <= n; ++i) {
    const double r = H[i] - f[i] - g * step * (history(H, i) + quadrature_weight(i, i) * H[i] * W[0]);
    defect = std::max(defect, std::abs(r));
    sup = std::max(sup, std::abs(H[i]));
  }
  KillSolution sol;
  sol.q = p.q;
  sol.phi = p.model.phi(p.q);
  sol.step = step;
  sol.x_min = -static_cast<double>(m) * step;
  sol.H.resize(m + n + 1);
  for (std::size_t i = 0; i < m; ++i) sol.H[i] = h.patie().H(sol.x_at(i));
  std::copy(H.begin(), H.end(), sol.H.begin() + static_cast<std::ptrdiff_t>(m));
  sol.L = h.patie().L();
  sol.residual = defect / sup;
  sol.iterations = 1;
  if (sol.residual > tol) throw AccuracyError("solve_H_halfline: residual above tolerance");
  return sol;
}

double brownian_H(double gamma, double x) {
  if (!(gamma >= 0.0)) throw DomainError("brownian_H: gamma must be >= 0");
  if (x < 0.0) throw DomainError("brownian_H: x must be >= 0");
  if (gamma == 0.0) return 1.0;
  const double r = std::sqrt(gamma);
  const double b = b_gamma(gamma);
  return (r - b) / (2.0 * r) * std::exp(-r * x) + (r + b) / (2.0 * r) * std::exp(r * x);
}

double objective_A(const SellProblem& p, const KillSolution& H, double b) {
  if (!(b >= p.z)) throw ArgumentError("objective_A: need b >= z");
  return b * passage_prob(H, std::log(p.z), std::log(b));
}

SellCurve argmax_A(const SellProblem& p, const KillSolution& H, double b_max, int scan_points) {
  if (!(b_max > p.z)) throw ArgumentError("argmax_A: need b_max > z");
  if (scan_points < 3) throw ConfigError("argmax_A: need at least 3 scan points");
  SellCurve c;
  const double u0 = std::log(p.z);
  const double u1 = std::log(b_max);
  const auto last = static_cast<std::size_t>(scan_points - 1);
  std::size_t best = 0;
  for (std::size_t i = 0; i <= last; ++i) {
    const double b = i == last ? b_max : std::exp(u0 + (u1 - u0) * static_cast<double>(i) / static_cast<double>(last));
    c.b.push_back(std::max(b, p.z));
    c.A.push_back(objective_A(p, H, c.b.back()));
    if (c.A.back() > c.A[best]) best = i;
  }
  c.b_star = c.b[best];
  c.A_star = c.A[best];
  if (best == 0 || best == last) return c;

  auto A_of = [&](double u) { return objective_A(p, H, std::exp(u)); };
  double lo = std::log(c.b[best - 1]);
  double hi = std::log(c.b[best + 1]);
  const double r = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = hi - r * (hi - lo);
  double d = lo + r * (hi - lo);
  double fa = A_of(a);
  double fd = A_of(d);
  for (int it = 0; it < 200 && hi - lo > 1e-12; ++it) {
    if (fa < fd) {
      lo = a;
      a = d;
      fa = fd;
      d = lo + r * (hi - lo);
      fd = A_of(d);
    } else {
      hi = d;
      d = a;
      fd = fa;
      a = hi - r * (hi - lo);
      fa = A_of(a);
    }
  }
  const double u = 0.5 * (lo + hi);
  const double Au = A_of(u);
  if (Au > c.A_star) {
    c.b_star = std::exp(u);
    c.A_star = Au;
  }
  return c;
}

double laplace_defect(const SellProblem& p, const KillSolution& H, double s) {
  const double rho = p.model.phi(p.q + p.gamma);
  if (!(s > rho)) throw DomainError("laplace_defect: need s > Phi(q + gamma)");
  const std::size_t i0 = H.zero_index();
  const std::size_t n = H.H.size() - 1 - i0;
  double Hhat = 0.0;
  for (std::size_t j = 0; j <= n; ++j) {
    const double x = static_cast<double>(j) * H.step;
    Hhat += quadrature_weight(n, j) * std::exp(-s * x) * H.H[i0 + j];
  }
  Hhat *= H.step;
  const double xe = static_cast<double>(n) * H.step;
  Hhat += H.H.back() * std::exp(-s * xe) / (s - rho);

  const Forcing h(p);
  boost::math::quadrature::exp_sinh<double> integrator;
  const double hhat = integrator.integrate([&](double x) { return std::exp(-s * x) * h(x); }, 1e-12);
  const double psi = p.model.psi(s);
  return Hhat * (psi - p.gamma - p.q) - hhat * (psi - p.q);
}

void write_svg(std::ostream& os, const SellCurve& curve) {
  constexpr double w = 640.0, ht = 400.0, pad = 50.0;
  const auto [bmin, bmax] = std::minmax_element(curve.b.begin(), curve.b.end());
  const auto [amin, amax] = std::minmax_element(curve.A.begin(), curve.A.end());
  const double b0 = *bmin, b1 = *bmax;
  const double a0 = std::min(0.0, *amin), a1 = *amax > a0 ? *amax : a0 + 1.0;
  auto px = [&](double b) { return pad + (w - 2 * pad) * (b - b0) / (b1 - b0); };
  auto py = [&](double a) { return ht - pad - (ht - 2 * pad) * (a - a0) / (a1 - a0); };
  char buf[160];
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"400\" viewBox=\"0 0 640 400\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  std::snprintf(buf, sizeof buf, "<line x1=\"%.2f\" y1=\"%.2f\" x2=\"%.2f\" y2=\"%.2f\" stroke=\"black\"/>\n", pad,
                ht - pad, w - pad, ht - pad);
  os << buf;
  std::snprintf(buf, sizeof buf, "<line x1=\"%.2f\" y1=\"%.2f\" x2=\"%.2f\" y2=\"%.2f\" stroke=\"black\"/>\n", pad, pad, pad,
                ht - pad);
  os << buf;
  os << "<polyline fill=\"none\" stroke=\"steelblue\" stroke-width=\"1.5\" points=\"";
  for (std::size_t i = 0; i < curve.b.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%s%.2f,%.2f", i ? " " : "", px(curve.b[i]), py(curve.A[i]));
    os << buf;
  }
  os << "\"/>\n";
  std::snprintf(buf, sizeof buf, "<circle cx=\"%.2f\" cy=\"%.2f\" r=\"3\" fill=\"crimson\"/>\n", px(curve.b_star),
                py(curve.A_star));
  os << buf;
  std::snprintf(buf, sizeof buf, "<text x=\"%.0f\" y=\"%.0f\" font-size=\"12\">b (%.4g to %.4g)</text>\n", w / 2 - 40,
                ht - 15, b0, b1);
  os << buf;
  std::snprintf(buf, sizeof buf, "<text x=\"10\" y=\"30\" font-size=\"12\">A(b), max %.6g at b = %.6g</text>\n",
                curve.A_star, curve.b_star);
  os << buf;
  os << "</svg>\n";
}

}  // namespace passage
