#include "passage/levy_model.hpp"

#include <cmath>
#include <sstream>

#include "passage/errors.hpp"

namespace passage {
namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

// Root of an increasing function on [lo, hi] with f(lo) <= 0 < f(hi).
// Newton steps are taken when they stay inside the bracket.
template <class F, class DF>
double bracketed_newton(F f, DF df, double lo, double hi) {
  double x = 0.5 * (lo + hi);
  for (int it = 0; it < 400; ++it) {
    const double fx = f(x);
    if (fx == 0.0) return x;
    if (fx > 0.0) hi = x; else lo = x;
    const double d = df(x);
    double next = (d > 0.0) ? x - fx / d : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - x) <= 1e-14 * std::max(1.0, std::abs(x)) || hi - lo <= 1e-15 * std::max(1.0, hi)) {
      return next;
    }
    x = next;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

LevyModel::LevyModel(Family family) : family_(family) {
  std::visit(overloaded{
                 [](const BrownianDrift& b) {
                   if (!(b.variance > 0.0) || !std::isfinite(b.variance) || !std::isfinite(b.drift)) {
                     throw ConfigError("brownian model needs finite drift and variance > 0");
                   }
                 },
                 [](const CramerLundberg& m) {
                   if (!(m.premium > 0.0) || !std::isfinite(m.premium)) throw ConfigError("premium c must be > 0");
                   if (!(m.jump_rate >= 0.0) || !std::isfinite(m.jump_rate)) throw ConfigError("jump rate must be >= 0");
                   if (!(m.eta > 0.0) || !std::isfinite(m.eta)) throw ConfigError("jump size rate eta must be > 0");
                   if (!(m.variance >= 0.0) || !std::isfinite(m.variance)) throw ConfigError("variance must be >= 0");
                   if (m.variance == 0.0 && m.jump_rate == 0.0) {
                     throw ConfigError("pure drift has monotone paths; need jump rate > 0 or variance > 0");
                   }
                 }},
             family_);

  const double d0 = psi_prime_zero();
  if (d0 >= 0.0) {
    phi_zero_ = 0.0;
    return;
  }
  // psi dips below zero: locate its minimiser, then the positive root beyond it.
  double hi = 1.0;
  while (psi_prime(hi) <= 0.0) hi *= 2.0;
  double lo = 0.0;
  for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (psi_prime(mid) > 0.0) hi = mid; else lo = mid;
  }
  const double minimiser = hi;
  double upper = std::max(2.0 * minimiser, 1.0);
  while (psi(upper) <= 0.0) upper *= 2.0;
  phi_zero_ = bracketed_newton([this](double t) { return psi(t); },
                               [this](double t) { return psi_prime(t); }, minimiser, upper);
}

double LevyModel::variance() const noexcept {
  return std::visit(overloaded{[](const BrownianDrift& b) { return b.variance; },
                               [](const CramerLundberg& m) { return m.variance; }},
                    family_);
}

double LevyModel::linear_drift() const noexcept {
  return std::visit(overloaded{[](const BrownianDrift& b) { return b.drift; },
                               [](const CramerLundberg& m) { return m.premium; }},
                    family_);
}

double LevyModel::jump_rate() const noexcept {
  const auto* m = std::get_if<CramerLundberg>(&family_);
  return m ? m->jump_rate : 0.0;
}

double LevyModel::jump_size_rate() const noexcept {
  const auto* m = std::get_if<CramerLundberg>(&family_);
  return m ? m->eta : 0.0;
}

double LevyModel::psi(double theta) const {
  if (!(theta >= 0.0)) throw DomainError("psi: theta must be >= 0");
  const double s2 = variance();
  double v = linear_drift() * theta + 0.5 * s2 * theta * theta;
  if (const auto* m = std::get_if<CramerLundberg>(&family_)) v -= m->jump_rate * theta / (m->eta + theta);
  return v;
}

std::complex<long double> LevyModel::psi(std::complex<long double> theta) const {
  const long double s2 = variance();
  std::complex<long double> v = static_cast<long double>(linear_drift()) * theta + 0.5L * s2 * theta * theta;
  if (const auto* m = std::get_if<CramerLundberg>(&family_)) {
    v -= static_cast<long double>(m->jump_rate) * theta / (static_cast<long double>(m->eta) + theta);
  }
  return v;
}

double LevyModel::psi_prime(double theta) const {
  if (!(theta > 0.0)) throw DomainError("psi_prime: theta must be > 0");
  double v = linear_drift() + variance() * theta;
  if (const auto* m = std::get_if<CramerLundberg>(&family_)) {
    const double d = m->eta + theta;
    v -= m->jump_rate * m->eta / (d * d);
  }
  return v;
}

double LevyModel::psi_prime_zero() const noexcept {
  double v = linear_drift();
  if (const auto* m = std::get_if<CramerLundberg>(&family_)) v -= m->jump_rate / m->eta;
  return v;
}

double LevyModel::psi_slope(double base, double eps) const noexcept {
  double v = linear_drift() + variance() * (base + 0.5 * eps);
  if (const auto* m = std::get_if<CramerLundberg>(&family_)) {
    v -= m->jump_rate * m->eta / ((m->eta + base) * (m->eta + base + eps));
  }
  return v;
}

std::complex<long double> LevyModel::psi_slope(long double base, std::complex<long double> eps) const {
  std::complex<long double> v =
      static_cast<long double>(linear_drift()) + static_cast<long double>(variance()) * (base + 0.5L * eps);
  if (const auto* m = std::get_if<CramerLundberg>(&family_)) {
    const long double eta = m->eta;
    v -= static_cast<long double>(m->jump_rate) * eta / ((eta + base) * (eta + base + eps));
  }
  return v;
}

double LevyModel::phi(double p) const {
  if (!(p >= 0.0) || !std::isfinite(p)) throw DomainError("phi: p must be finite and >= 0");
  if (p == 0.0) return phi_zero_;
  double lo = phi_zero_;
  double hi = std::max(1.0, phi_zero_ + 1.0);
  while (psi(hi) <= p) {
    lo = hi;
    hi *= 2.0;
  }
  return bracketed_newton([this, p](double t) { return psi(t) - p; },
                          [this](double t) { return psi_prime(t); }, lo, hi);
}

double LevyModel::psi_prime_at_phi(double q) const {
  const double r = phi(q);
  return r > 0.0 ? psi_prime(r) : psi_prime_zero();
}

std::string LevyModel::describe() const {
  std::ostringstream os;
  os.precision(17);
  std::visit(overloaded{[&](const BrownianDrift& b) {
                          os << "brownian(mu=" << b.drift << ", sigma2=" << b.variance << ")";
                        },
                        [&](const CramerLundberg& m) {
                          os << "cramer_lundberg(c=" << m.premium << ", lambda=" << m.jump_rate
                             << ", eta=" << m.eta << ", sigma2=" << m.variance << ")";
                        }},
             family_);
  return os.str();
}

}  // namespace passage
