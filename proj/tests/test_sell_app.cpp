#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <sstream>

#include "doctest.h"
#include "oracle.hpp"
#include "passage/errors.hpp"
#include "passage/kill_solver.hpp"
#include "passage/sell_app.hpp"

using namespace passage;

namespace {

const LevyModel bm = LevyModel::brownian(0.0, 2.0);

SellProblem brownian(double gamma) { return {bm, 0.0, 1.0, gamma, 1.0}; }

}  // namespace

TEST_CASE("b_gamma") {
  CHECK(b_gamma(0.0) == 0.0);
  CHECK(b_gamma(1.0) == doctest::Approx(oracle::b1).epsilon(1e-14));
  CHECK(b_gamma(0.9) == doctest::Approx(oracle::b_09).epsilon(1e-14));
  CHECK(b_gamma(1.1) == doctest::Approx(oracle::b_11).epsilon(1e-14));
}

TEST_CASE("forcing term") {
  for (double g : {0.9, 1.0, 1.1}) {
    const auto p = brownian(g);
    for (double x : {0.0, 0.5, 1.0, 3.0}) CHECK(h_eval(p, x) == doctest::Approx(1.0 + b_gamma(g) * x).epsilon(1e-9));
  }
  CHECK(h_eval(brownian(1.0), 1.0) - 1.0 == doctest::Approx(oracle::b1).epsilon(1e-6));

  const SellProblem off{LevyModel::cramer_lundberg(1.5, 1.0, 1.0), 0.4, 1.0, 0.0, 1.0};
  const double phi = off.model.phi(off.q);
  for (double x : {0.0, 0.7, 2.0}) CHECK(h_eval(off, x) == doctest::Approx(std::exp(phi * x)).epsilon(1e-12));
}

TEST_CASE("Brownian closed form") {
  CHECK(brownian_H(1.0, 0.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(brownian_H(1.0, 1.0) == doctest::Approx(oracle::brownian_H_1_1).epsilon(1e-14));
  CHECK(brownian_H(0.0, 3.0) == 1.0);
  CHECK_THROWS_AS(brownian_H(-1.0, 0.0), DomainError);

  // H(x) = 1 + b x + gamma int_0^x H(y) (x - y) dy
  for (double g : {0.5, 1.0, 1.1}) {
    for (double x = 0.25; x <= 5.0; x += 0.25) {
      const double conv = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
          [&](double y) { return brownian_H(g, y) * (x - y); }, 0.0, x, 10, 1e-14);
      const double lhs = brownian_H(g, x);
      CHECK(std::abs(lhs - (1.0 + b_gamma(g) * x + g * conv)) <= 1e-8 * lhs);
    }
  }
}

TEST_CASE("half-line solution") {
  const auto p = brownian(1.1);
  const auto H = solve_H_halfline(p, std::log(30.0) + 0.01, 1e-3, 1e-8);
  CHECK(H.at(0.0) == 1.0);
  double err = 0.0;
  for (double x = 0.0; x <= std::log(30.0); x += 0.01) {
    err = std::max(err, std::abs(H.at(x) - brownian_H(1.1, x)) / brownian_H(1.1, x));
  }
  CHECK(err <= 1e-4);
  // Below zero the solution is the exponential-killing series.
  CHECK(H.at(-3.0) == doctest::Approx(PatieSeries(bm, 0.0, 1.0, 1.1).H(-3.0)).epsilon(1e-9));
}

TEST_CASE("half-line and full-line solvers agree") {
  const SellProblem p{LevyModel::cramer_lundberg(1.5, 1.0, 1.0), 0.3, 1.0, 0.8, 1.0};
  const auto half = solve_H_halfline(p, 3.0, 0.005, 1e-9);
  const auto full = solve_picard(p.model, p.q, sell_omega(p), -10.0, 3.0, 0.005, 1e-9);
  double gap = 0.0;
  for (double x = 0.0; x <= 3.0; x += 0.1) gap = std::max(gap, std::abs(half.at(x) - full.at(x)) / full.at(x));
  // The kink of omega at 0 limits the full-line quadrature to O(h^2).
  CHECK(gap <= 1e-5);
}

TEST_CASE("objective") {
  const auto p = brownian(1.0);
  const auto H = solve_H_halfline(p, std::log(30.0) + 0.01, 1e-3, 1e-8);
  CHECK(objective_A(p, H, 1.0) == 1.0);
  CHECK_THROWS_AS(objective_A(p, H, 0.5), ArgumentError);
  for (double b : {1.5, 4.0, 29.0}) {
    const double a = objective_A(p, H, b);
    CHECK(a > 0.0);
    CHECK(a <= b);
  }
}

TEST_CASE("objective against the closed form") {
  const double tol = 1e-6;
  const struct {
    double gamma, a30, a1e4;
  } rows[] = {{0.9, oracle::A30_g09, oracle::A1e4_g09},
              {1.0, oracle::A30_g10, oracle::A1e4_g10},
              {1.1, oracle::A30_g11, oracle::A1e4_g11}};
  for (const auto& r : rows) {
    CAPTURE(r.gamma);
    const auto p = brownian(r.gamma);
    const auto H = solve_H_halfline(p, std::log(1e4) + 0.01, 1e-3, 1e-8);
    CHECK(objective_A(p, H, 30.0) == doctest::Approx(r.a30).epsilon(tol));
    CHECK(objective_A(p, H, 1e4) == doctest::Approx(r.a1e4).epsilon(tol));
  }
  CHECK(oracle::A1e4_g10 == doctest::Approx(oracle::A_limit_gamma1).epsilon(1e-8));
}

TEST_CASE("argmax") {
  const auto p = brownian(1.1);
  const auto H = solve_H_halfline(p, std::log(30.0) + 0.01, 1e-3, 1e-8);
  const auto c = argmax_A(p, H, 30.0);
  CHECK(c.b.size() == 512);
  CHECK(c.b.front() == 1.0);
  CHECK(c.b.back() == doctest::Approx(30.0));
  CHECK(c.b_star > 1.0);
  CHECK(c.b_star < 30.0);
  for (double a : c.A) CHECK(a <= c.A_star * (1.0 + 1e-12));
  // Interior optimum of b / H(log b): first-order condition H'/H = 1/b.
  const double x = std::log(c.b_star), d = 1e-4;
  const double slope = (std::log(brownian_H(1.1, x + d)) - std::log(brownian_H(1.1, x - d))) / (2.0 * d);
  CHECK(slope == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("constant killing rate") {
  // With omega = gamma everywhere the objective is b^{1 - Phi} z^Phi.
  const LevyModel m = LevyModel::cramer_lundberg(1.5, 1.0, 1.0);
  const double gamma = 0.6, q = 0.2, z = 1.5;
  const auto sol = solve_volterra(m, q, OmegaSpec::pure(TailConstant{gamma}), -6.0, 3.0, 0.005, 1e-10);
  const SellProblem p{m, q, 1.0, gamma, z};
  const double phi = m.phi(q + gamma);
  double prev = 0.0;
  for (double b : {1.5, 2.5, 6.0, 18.0}) {
    const double a = objective_A(p, sol, b);
    CHECK(a == doctest::Approx(std::pow(b, 1.0 - phi) * std::pow(z, phi)).epsilon(1e-6));
    CHECK(a >= prev);
    prev = a;
  }
}

TEST_CASE("Laplace identity") {
  const auto p = brownian(1.1);
  const auto H = solve_H_halfline(p, 12.0, 1e-3, 1e-8);
  const double base = bm.phi(p.q + p.gamma);
  for (double ds : {0.5, 1.0, 2.0}) CHECK(std::abs(laplace_defect(p, H, base + ds)) <= 1e-4);
}

TEST_CASE("svg output") {
  SellCurve c;
  c.b = {1.0, 2.0, 3.0};
  c.A = {1.0, 1.2, 1.1};
  c.b_star = 2.0;
  c.A_star = 1.2;
  std::ostringstream os;
  write_svg(os, c);
  const auto s = os.str();
  CHECK(s.find("<svg") != std::string::npos);
  CHECK(s.find("</svg>") != std::string::npos);
}
