#include "passage/omega.hpp"

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

void validate(const TailClass& tail) {
  std::visit(overloaded{
                 [](const TailZero&) {},
                 [](const TailConstant& t) {
                   if (!(t.a > 0.0) || !std::isfinite(t.a)) throw ConfigError("constant tail: a must be > 0");
                 },
                 [](const TailExponential& t) {
                   if (!(t.gamma >= 0.0) || !std::isfinite(t.gamma)) throw ConfigError("exponential tail: gamma must be >= 0");
                   if (!(t.alpha > 0.0) || !std::isfinite(t.alpha)) throw ConfigError("exponential tail: alpha must be > 0");
                 },
                 [](const TailPowerExp& t) {
                   if (!(t.gamma >= 0.0) || !std::isfinite(t.gamma)) throw ConfigError("powerexp tail: gamma must be >= 0");
                   if (!(t.alpha > 0.0) || !std::isfinite(t.alpha)) throw ConfigError("powerexp tail: alpha must be > 0");
                   if (t.degree < 0) throw ConfigError("powerexp tail: degree must be >= 0");
                 },
                 [](const TailCsbp& t) {
                   if (!(t.gamma > 0.0) || !std::isfinite(t.gamma)) throw ConfigError("csbp tail: gamma must be > 0");
                   if (!(t.c > 0.0) || !std::isfinite(t.c)) throw ConfigError("csbp tail: c must be > 0");
                 },
                 [](const TailPower& t) {
                   if (!(t.gamma >= 0.0) || !std::isfinite(t.gamma)) throw ConfigError("power tail: gamma must be >= 0");
                   if (t.n < 2) throw ConfigError("power tail: n must be >= 2");
                   if (!(t.c > 0.0) || !std::isfinite(t.c)) throw ConfigError("power tail: c must be > 0");
                 }},
             tail);
}

}  // namespace

double tail_value(const TailClass& tail, double x) {
  return std::visit(overloaded{[](const TailZero&) { return 0.0; },
                               [](const TailConstant& t) { return t.a; },
                               [x](const TailExponential& t) { return t.gamma * std::exp(t.alpha * x); },
                               [x](const TailPowerExp& t) {
                                 return t.gamma * std::pow(std::abs(x), t.degree) * std::exp(t.alpha * x);
                               },
                               [x](const TailCsbp& t) { return t.gamma / std::abs(x); },
                               [x](const TailPower& t) { return t.gamma / std::pow(std::abs(x), t.n); }},
                    tail);
}

std::string tail_name(const TailClass& tail) {
  std::ostringstream os;
  os.precision(17);
  std::visit(overloaded{[&](const TailZero&) { os << "zero"; },
                        [&](const TailConstant& t) { os << "constant(a=" << t.a << ")"; },
                        [&](const TailExponential& t) {
                          os << "exponential(gamma=" << t.gamma << ", alpha=" << t.alpha << ")";
                        },
                        [&](const TailPowerExp& t) {
                          os << "powerexp(gamma=" << t.gamma << ", alpha=" << t.alpha << ", degree=" << t.degree << ")";
                        },
                        [&](const TailCsbp& t) { os << "csbp(gamma=" << t.gamma << ", c=" << t.c << ")"; },
                        [&](const TailPower& t) {
                          os << "power(gamma=" << t.gamma << ", n=" << t.n << ", c=" << t.c << ")";
                        }},
             tail);
  return os.str();
}

OmegaSpec::OmegaSpec(Body body, TailClass tail, double x_tail)
    : body_(std::move(body)), tail_(tail), x_tail_(x_tail) {
  validate(tail_);
  if (!body_) throw ConfigError("omega: missing body");
  if (!std::isfinite(x_tail_)) throw ConfigError("omega: x_tail must be finite");
  const double* c = nullptr;
  if (const auto* t = std::get_if<TailCsbp>(&tail_)) c = &t->c;
  if (const auto* t = std::get_if<TailPower>(&tail_)) c = &t->c;
  if (c && x_tail_ > -*c) throw ConfigError("omega: x_tail must be <= -c for csbp/power tails");
  const double want = tail_value(tail_, x_tail_);
  const double got = body_(x_tail_);
  if (!(std::abs(got - want) <= 1e-9 * std::max(1.0, std::abs(want)))) {
    std::ostringstream os;
    os.precision(17);
    os << "omega: body(" << x_tail_ << ") = " << got << " disagrees with tail " << tail_name(tail_) << " = " << want;
    throw ConfigError(os.str());
  }
}

OmegaSpec OmegaSpec::pure(const TailClass& tail) {
  double x_tail = 0.0;
  if (const auto* t = std::get_if<TailCsbp>(&tail)) x_tail = -t->c;
  if (const auto* t = std::get_if<TailPower>(&tail)) x_tail = -t->c;
  return OmegaSpec([tail](double x) { return tail_value(tail, x); }, tail, x_tail);
}

void OmegaSpec::check_range(double lo, double hi, int samples) const {
  for (int i = 0; i <= samples; ++i) {
    const double x = lo + (hi - lo) * i / samples;
    const double v = (*this)(x);
    if (!std::isfinite(v) || v < 0.0) {
      std::ostringstream os;
      os.precision(17);
      os << "omega(" << x << ") = " << v << " is not a finite nonnegative rate";
      throw DomainError(os.str());
    }
  }
}

OmegaSpec OmegaSpec::scaled(double factor) const {
  if (!(factor > 0.0) || !std::isfinite(factor)) throw DomainError("omega scaling factor must be > 0");
  TailClass t = std::visit(overloaded{[](const TailZero& z) -> TailClass { return z; },
                                      [&](const TailConstant& c) -> TailClass { return TailConstant{factor * c.a}; },
                                      [&](const TailExponential& e) -> TailClass {
                                        return TailExponential{factor * e.gamma, e.alpha};
                                      },
                                      [&](const TailPowerExp& e) -> TailClass {
                                        return TailPowerExp{factor * e.gamma, e.alpha, e.degree};
                                      },
                                      [&](const TailCsbp& e) -> TailClass { return TailCsbp{factor * e.gamma, e.c}; },
                                      [&](const TailPower& e) -> TailClass {
                                        return TailPower{factor * e.gamma, e.n, e.c};
                                      }},
                           tail_);
  auto b = body_;
  return OmegaSpec([b, factor](double x) { return factor * b(x); }, t, x_tail_);
}

}  // namespace passage
