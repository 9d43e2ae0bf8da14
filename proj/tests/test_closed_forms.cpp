#include <boost/math/quadrature/exp_sinh.hpp>
#include <cmath>

#include "doctest.h"
#include "oracle.hpp"
#include "passage/closed_forms.hpp"
#include "passage/errors.hpp"
#include "passage/kill_solver.hpp"
#include "passage/scale_fn.hpp"

using namespace passage;

namespace {

const LevyModel bm = LevyModel::brownian(0.0, 2.0);
const LevyModel cl = LevyModel::cramer_lundberg(1.5, 1.0, 1.0);

// e^{-Phi t} W(t) summed from the partial fractions; no rate exceeds Phi.
double tilted(const ScaleExpansion& w, double t) {
  double s = 0.0;
  for (const auto& term : w.terms()) s += (term.coeff + term.linear * t) * std::exp((term.rate - w.phi()) * t);
  return s;
}

// int_0^inf W(t) f(x - t) dt, given g(y) = e^{-Phi y} f(y).
template <class G>
double convolve(const ScaleExpansion& w, double x, G g) {
  boost::math::quadrature::exp_sinh<double> integrator;
  const double ex = std::exp(w.phi() * x);
  return integrator.integrate([&](double t) { return tilted(w, t) * ex * g(x - t); }, 1e-12);
}

}  // namespace

TEST_CASE("Patie series basics") {
  const PatieSeries off(cl, 0.5, 1.0, 0.0);
  for (double x : {-3.0, 0.0, 1.5}) CHECK(off.H(x) == doctest::Approx(std::exp(off.phi() * x)).epsilon(1e-14));
  CHECK(off.L() == 1.0);

  const PatieSeries p(bm, 0.0, 1.0, 1.0);
  CHECK(p.H(0.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(p.L() == doctest::Approx(oracle::patie_L).epsilon(1e-14));
  CHECK(p.H(-20.0) * std::exp(20.0 * p.phi()) == doctest::Approx(p.L()).epsilon(1e-8));
  const PatieSeries p1(bm, 1.0, 1.0, 1.0);
  CHECK(p1.H(-30.0) * std::exp(30.0 * p1.phi()) == doctest::Approx(p1.L()).epsilon(1e-12));
}

TEST_CASE("Patie series under a shift of the killing rate") {
  // omega(x + s) = gamma e^{alpha s} e^{alpha x}
  const double s = 0.7;
  const PatieSeries p(cl, 0.3, 1.5, 0.8);
  const PatieSeries shifted(cl, 0.3, 1.5, 0.8 * std::exp(1.5 * s));
  for (double x : {-4.0, -1.0, 0.0, 0.5}) {
    CHECK(p.H(x + s) / p.H(s) == doctest::Approx(shifted.H(x)).epsilon(1e-12));
  }
}

TEST_CASE("Patie series solves the renewal equation") {
  // H(x) = L e^{Phi x} + int W(x - y) gamma e^{alpha y} H(y) dy
  for (const auto& m : {bm, cl}) {
    const double q = 0.4, alpha = 1.2, gamma = 0.9;
    const PatieSeries p(m, q, alpha, gamma);
    const ScaleExpansion w(m, q);
    for (double x : {-2.0, 0.0, 1.0}) {
      const double conv = convolve(w, x, [&](double y) {
        return y < -700.0 ? 0.0 : gamma * std::exp(alpha * y) * p.H(y) * std::exp(-p.phi() * y);
      });
      const double rhs = p.L() * std::exp(p.phi() * x) + conv;
      CHECK(std::abs(rhs - p.H(x)) <= 1e-6 * p.H(x));
    }
  }
}

TEST_CASE("Patie series range") {
  const PatieSeries p(bm, 0.0, 0.05, 5.0);
  CHECK_THROWS_AS(p.H(400.0), RangeError);
  CHECK_THROWS_AS(PatieSeries(bm, 0.0, 0.0, 1.0), DomainError);
  CHECK_THROWS_AS(PatieSeries(bm, 0.0, 1.0, -1.0), DomainError);
}

TEST_CASE("csbp function") {
  const double q = 0.2, gamma = 0.8, c = 1.0;
  const double phi = bm.phi(q);
  const CsbpFunction a(bm, q, gamma, c, phi + 0.5);
  const CsbpFunction b(bm, q, gamma, c, phi + 2.0);
  CHECK(a.normalized(-c) == doctest::Approx(1.0).epsilon(1e-14));
  // Changing the anchor changes only a constant factor.
  for (double x : {-1.5, -3.0, -8.0}) CHECK(a.normalized(x) == doctest::Approx(b.normalized(x)).epsilon(1e-10));
  double prev = 0.0;
  for (double x = -12.0; x <= -c; x += 0.5) {
    const double v = a.normalized(x);
    CHECK(v > prev);
    prev = v;
  }
  CHECK_THROWS_AS(a.value(-0.5), DomainError);
  CHECK_THROWS_AS(CsbpFunction(bm, q, gamma, c, phi), DomainError);
}

TEST_CASE("power tail expansion") {
  const double q = 0.5, c = 1.0, x = -2.0;
  const auto zero = powertail_terms(cl, q, 0.0, 2, c, 3, x);
  CHECK(zero.scaled == 1.0);
  CHECK(zero.value == doctest::Approx(std::exp(cl.phi(q) * x)));

  double prev = 0.0;
  for (int d = 0; d <= 3; ++d) {
    const double v = powertail_terms(cl, q, 0.5, 2, c, d, x).value;
    CHECK(v >= prev);
    prev = v;
  }

  // The first term is W convolved with the tail rate times e^{Phi y}.
  const double gamma = 0.5;
  const ScaleExpansion w(cl, q);
  for (int n : {2, 3}) {
    const double direct = convolve(w, x, [&](double y) { return gamma * std::pow(-y, -n); });
    CHECK(powertail_terms(cl, q, gamma, n, c, 1, x).last_term == doctest::Approx(direct).epsilon(1e-6));
  }

  CHECK_THROWS_AS(powertail_terms(cl, q, gamma, 2, c, 7, x), ConfigError);
  CHECK_THROWS_AS(powertail_terms(bm, 0.0, gamma, 2, c, 1, x), UnsupportedError);
  CHECK_THROWS_AS(powertail_terms(cl, q, gamma, 2, c, 1, -0.5), DomainError);
}

TEST_CASE("truncation bound of the exponential series") {
  CHECK(trunc_bound(bm, 0.0, 1.0, 1.0, 0, 0.0) == doctest::Approx(oracle::tail_sum_n0).epsilon(1e-13));
  CHECK(trunc_bound(bm, 0.0, 1.0, 1.0, 3, 0.0) == doctest::Approx(oracle::tail_sum_n3).epsilon(1e-12));
  CHECK(trunc_bound(bm, 0.0, 0.0, 1.0, 0, 0.0) == 0.0);
  CHECK(trunc_bound(bm, 0.0, 1.0, 1.0, 3, -1.0) < trunc_bound(bm, 0.0, 1.0, 1.0, 3, 0.0));
}
