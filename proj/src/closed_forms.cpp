#include "passage/closed_forms.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <limits>
#include <sstream>

#include "passage/errors.hpp"

namespace passage {

PatieSeries::PatieSeries(const LevyModel& model, double q, double alpha, double gamma)
    : q_(q), alpha_(alpha), gamma_(gamma), phi_(model.phi(q)) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw DomainError("patie series: alpha must be > 0");
  if (!(gamma >= 0.0) || !std::isfinite(gamma)) throw DomainError("patie series: gamma must be >= 0");
  log_a_.assign(kMaxTerms + 1, 0.0);
  for (std::size_t l = 1; l <= kMaxTerms; ++l) {
    const double step = l * alpha;
    log_a_[l] = log_a_[l - 1] - std::log(step * model.psi_slope(phi_, step));
  }
  log_norm_ = log_sum(0.0, &k_zero_);
  L_ = std::exp(-log_norm_);
}

double PatieSeries::log_sum(double x, std::size_t* used) const {
  if (gamma_ == 0.0) {
    if (used) *used = 1;
    return phi_ * x;
  }
  const double lg = std::log(gamma_);
  const double stop = std::log(1e-16);
  double m = -std::numeric_limits<double>::infinity();
  double s = 0.0;
  double prev = m;
  for (std::size_t k = 0; k <= kMaxTerms; ++k) {
    const double t = log_a_[k] + k * lg + (phi_ + alpha_ * k) * x;
    if (t > m) {
      s = s * std::exp(m - t) + 1.0;
      m = t;
    } else {
      s += std::exp(t - m);
    }
    if (k > 0 && t < prev && t - (m + std::log(s)) < stop) {
      if (used) *used = k + 1;
      return m + std::log(s);
    }
    prev = t;
  }
  // Largest x at which the final ratio is still below 1e-8.
  const double last = log_a_[kMaxTerms - 1] - log_a_[kMaxTerms];
  const double cap = (last - lg - std::log(1e8)) / alpha_;
  std::ostringstream os;
  os.precision(6);
  os << "patie series did not converge within " << kMaxTerms << " terms at x=" << x << "; keep x below about " << cap;
  throw RangeError(os.str());
}

double PatieSeries::log_unnormalized(double x) const { return log_sum(x, nullptr); }

double PatieSeries::H(double x) const {
  const double v = std::exp(log_sum(x, nullptr) - log_norm_);
  if (!std::isfinite(v)) throw RangeError("patie_H overflow; reduce x");
  return v;
}

CsbpFunction::CsbpFunction(const LevyModel& model, double q, double gamma, double c, double theta)
    : model_(model), q_(q), gamma_(gamma), c_(c), theta_(theta), phi_(model.phi(q)) {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) throw DomainError("csbp: gamma must be > 0");
  if (!(c > 0.0) || !std::isfinite(c)) throw DomainError("csbp: c must be > 0");
  if (!(theta > phi_) || !std::isfinite(theta)) throw DomainError("csbp: theta must exceed Phi(q)");
  critical_ = model.psi_prime_at_phi(q) <= 0.0;
  v_anchor_ = std::log(theta - phi_);
  const double v_lo = -30.0;
  const double v_hi = std::log(60.0 / c) + 1.0;
  k_lo_ = std::min(0L, static_cast<long>(std::floor((v_lo - v_anchor_) / dv_)));
  const long k_hi = std::max(0L, static_cast<long>(std::ceil((v_hi - v_anchor_) / dv_)));
  table_.assign(static_cast<std::size_t>(k_hi - k_lo_ + 1), 0.0);

  auto g = [&](double w) { return gamma_ / model_.psi_slope(phi_, std::exp(w)); };
  using GL = boost::math::quadrature::gauss<double, 10>;
  const auto anchor = static_cast<std::size_t>(-k_lo_);
  for (std::size_t i = anchor + 1; i < table_.size(); ++i) {
    const double a = v_anchor_ + (static_cast<long>(i - 1) + k_lo_) * dv_;
    table_[i] = table_[i - 1] + GL::integrate(g, a, a + dv_);
  }
  for (std::size_t i = anchor; i-- > 0;) {
    const double a = v_anchor_ + (static_cast<long>(i) + k_lo_) * dv_;
    table_[i] = table_[i + 1] - GL::integrate(g, a, a + dv_);
  }
  left_slope_ = g(v_anchor_ + k_lo_ * dv_);
  right_slope_ = g(v_anchor_ + k_hi * dv_);
  log_norm_ = log_value(-c_);
}

double CsbpFunction::G(long k) const {
  const long k_hi = k_lo_ + static_cast<long>(table_.size()) - 1;
  if (k < k_lo_) {
    const double dist = (k_lo_ - k) * dv_;
    // Near z = Phi the integrand tends to gamma/psi'(Phi+), or blows up like e^{-v} when psi'(Phi+) = 0.
    return critical_ ? table_.front() + left_slope_ * -std::expm1(dist) : table_.front() - left_slope_ * dist;
  }
  if (k > k_hi) return table_.back() + right_slope_ * (k - k_hi) * dv_;
  return table_[static_cast<std::size_t>(k - k_lo_)];
}

double CsbpFunction::log_integrand(long k, double x) const {
  const double eps = std::exp(v_anchor_ + k * dv_);
  return -std::log(model_.psi_slope(phi_, eps)) + x * eps + G(k);
}

double CsbpFunction::log_value(double x) const {
  if (!(x <= -c_ * (1.0 - 1e-12))) throw DomainError("csbp_H: x must be <= -c");
  const double peak_rate = critical_ ? 1.0 : gamma_ / model_.psi_prime_at_phi(q_);
  long k = static_cast<long>(std::lround((std::log(peak_rate / std::abs(x)) - v_anchor_) / dv_));
  double lk = log_integrand(k, x);
  for (;;) {
    const double up = log_integrand(k + 1, x);
    if (up <= lk) break;
    ++k;
    lk = up;
  }
  for (;;) {
    const double down = log_integrand(k - 1, x);
    if (down <= lk) break;
    --k;
    lk = down;
  }
  const double cutoff = std::log(1e-18);
  double s = 1.0;
  constexpr long kMaxNodes = 20'000'000;
  long n = 0;
  for (long j = k + 1;; ++j, ++n) {
    const double t = log_integrand(j, x) - lk;
    s += std::exp(t);
    if (t < cutoff) break;
    if (n > kMaxNodes) throw AccuracyError("csbp_H: outer integral failed to converge");
  }
  for (long j = k - 1;; --j, ++n) {
    const double t = log_integrand(j, x) - lk;
    s += std::exp(t);
    if (t < cutoff) break;
    if (n > kMaxNodes) throw AccuracyError("csbp_H: outer integral failed to converge");
  }
  return phi_ * x + lk + std::log(s * dv_);
}

double CsbpFunction::value(double x) const { return std::exp(log_value(x)); }
double CsbpFunction::ratio(double x1, double x2) const { return std::exp(log_value(x1) - log_value(x2)); }
double CsbpFunction::normalized(double x) const { return std::exp(log_value(x) - log_norm_); }

double csbp_H(const LevyModel& model, double q, double gamma, double c, double theta, double x) {
  return CsbpFunction(model, q, gamma, c, theta).normalized(x);
}

namespace {

struct PowerTailNest {
  const LevyModel& model;
  double phi, x, tol;
  int n;

  double operator()(int d, double s) const {
    if (d == 0) return 1.0;
    auto f = [&](double y) {
      if (!(y > 0.0)) return 0.0;
      const double u = s + y;
      // y^{n-1}/u computed as y^{n-2} when s = 0 to avoid 0/0.
      const double poly = s == 0.0 ? std::pow(y, n - 2) : std::pow(y, n - 1) / u;
      return poly * std::exp(x * y) / model.psi_slope(phi, u) * (*this)(d - 1, u);
    };
    double err = 0.0;
    const double v = boost::math::quadrature::gauss_kronrod<double, 21>::integrate(
        f, 0.0, std::numeric_limits<double>::infinity(), 12, tol, &err);
    if (!std::isfinite(v)) throw AccuracyError("powertail: nested integral is not finite");
    return v;
  }
};

}  // namespace

PowerTailValue powertail_terms(const LevyModel& model, double q, double gamma, int n, double c, int depth,
                               double x) {
  if (!(gamma >= 0.0)) throw DomainError("powertail: gamma must be >= 0");
  if (n < 2) throw DomainError("powertail: n must be >= 2");
  if (!(c > 0.0)) throw DomainError("powertail: c must be > 0");
  if (depth < 0) throw DomainError("powertail: depth must be >= 0");
  if (depth > 6) throw ConfigError("powertail: depth > 6 exceeds the cost guard");
  if (!(x <= -c * (1.0 - 1e-12))) throw DomainError("powertail: x must be <= -c");
  if (q == 0.0 && model.critical()) {
    throw UnsupportedError("powertail: q = 0 with psi'(0+) = 0 makes the convolution infinite");
  }
  const double phi = model.phi(q);
  double scaled = 1.0;
  double last = 0.0;
  if (gamma > 0.0 && depth > 0) {
    const PowerTailNest nest{model, phi, x, 1e-10 / depth, n};
    const double pre = gamma / std::tgamma(static_cast<double>(n));
    for (int d = 1; d <= depth; ++d) {
      last = std::pow(pre, d) * nest(d, 0.0);
      scaled += last;
    }
  }
  const double e = std::exp(phi * x);
  return {e * scaled, scaled, e * last};
}

}  // namespace passage
