#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "passage/closed_forms.hpp"
#include "passage/errors.hpp"
#include "passage/kill_solver.hpp"

using namespace passage;

namespace {

const LevyModel bm = LevyModel::brownian(0.0, 2.0);
const LevyModel cl = LevyModel::cramer_lundberg(1.5, 1.0, 1.0);

OmegaSpec exp_omega(double gamma, double alpha) { return OmegaSpec::pure(TailExponential{gamma, alpha}); }

double sup_rel_error(const KillSolution& s, const auto& exact) {
  double err = 0.0;
  for (std::size_t i = 0; i < s.H.size(); ++i) {
    const double e = exact(s.x_at(i));
    err = std::max(err, std::abs(s.H[i] - e) / std::max(1.0, e));
  }
  return err;
}

}  // namespace

TEST_CASE("no killing gives the exponential") {
  const auto w = OmegaSpec::pure(TailZero{});
  const auto s = solve_picard(cl, 0.5, w, -5.0, 2.0, 0.01, 1e-10);
  CHECK(s.L == 1.0);
  CHECK(sup_rel_error(s, [&](double x) { return std::exp(s.phi * x); }) < 1e-13);

  const auto flat = solve_picard(bm, 0.0, w, -5.0, 2.0, 0.01, 1e-10);
  CHECK(std::all_of(flat.H.begin(), flat.H.end(), [](double v) { return v == 1.0; }));
}

TEST_CASE("grid layout") {
  const auto s = solve(bm, 0.2, exp_omega(1.0, 1.0), -4.0, 1.0, 0.01, 1e-9);
  CHECK(s.x_at(s.zero_index()) == 0.0);
  CHECK(s.H[s.zero_index()] == 1.0);
  CHECK(s.x_min == doctest::Approx(-4.0));
  CHECK(s.x_max() == doctest::Approx(1.0));
  CHECK(s.at(0.0) == 1.0);
  CHECK_THROWS_AS(s.at(1.5), RangeError);
}

TEST_CASE("Picard matches the exponential series") {
  const auto w = exp_omega(1.0, 1.0);
  for (double q : {0.0, 1.0}) {
    const auto s = solve_picard(bm, q, w, -8.0, 3.0, 5e-3, 1e-10);
    const PatieSeries p(bm, q, 1.0, 1.0);
    CAPTURE(q);
    CHECK(sup_rel_error(s, [&](double x) { return p.H(x); }) <= 1e-3);
    CHECK(s.L == doctest::Approx(p.L()).epsilon(1e-4));
    CHECK(s.residual <= 1e-10);
  }
}

TEST_CASE("Picard iterates increase") {
  PicardTrace trace;
  solve_picard(cl, 0.3, exp_omega(0.7, 1.0), -6.0, 1.0, 0.02, 1e-10, &trace, {.keep_iterates = true});
  REQUIRE(trace.iterates.size() >= 2);
  for (std::size_t n = 1; n < trace.iterates.size(); ++n) {
    for (std::size_t i = 0; i < trace.iterates[n].size(); ++i) {
      CHECK(trace.iterates[n][i] >= trace.iterates[n - 1][i] * (1.0 - 1e-14));
    }
  }
}

TEST_CASE("Volterra and Picard agree") {
  const auto w = exp_omega(1.0, 1.0);
  for (const auto& m : {bm, cl}) {
    const auto a = solve_picard(m, 0.5, w, -8.0, 2.0, 0.01, 1e-10);
    const auto b = solve_volterra(m, 0.5, w, -8.0, 2.0, 0.01, 1e-10);
    REQUIRE(a.H.size() == b.H.size());
    double gap = 0.0;
    for (std::size_t i = 0; i < a.H.size(); ++i) gap = std::max(gap, std::abs(a.H[i] - b.H[i]) / a.H[i]);
    CHECK(gap <= 2e-10);
  }
}

TEST_CASE("killing only above zero") {
  const OmegaSpec w([](double x) { return x > 0.0 ? 1.0 : 0.0; }, TailZero{}, 0.0);
  const auto s = solve_picard(cl, 0.2, w, -5.0, 4.0, 0.01, 1e-10);
  CHECK(s.L > 0.0);
  CHECK(s.L <= 1.0);
  CHECK(s.residual <= 1e-10);
  // Below zero there is no killing yet, so H is a multiple of e^{Phi x} there.
  CHECK(s.at(-3.0) / s.at(-1.0) == doctest::Approx(std::exp(-2.0 * s.phi)).epsilon(1e-6));
}

TEST_CASE("constant killing") {
  const auto s = solve_volterra(bm, 0.0, OmegaSpec::pure(TailConstant{0.5}), -5.0, 2.0, 0.01, 1e-10);
  CHECK(s.L == 0.0);
  CHECK(sup_rel_error(s, [](double x) { return std::exp(std::sqrt(0.5) * x); }) <= 1e-6);
  CHECK(passage_prob(s, -2.0, 1.5) == doctest::Approx(std::exp(-std::sqrt(0.5) * 3.5)).epsilon(1e-6));
}

TEST_CASE("killing that jumps at zero") {
  const OmegaSpec w([](double x) { return x >= 0.0 ? 2.0 : 1.0; }, TailConstant{1.0}, -1.0);
  const double q = 0.1;
  const auto s = solve_volterra(cl, q, w, -6.0, 3.0, 0.01, 1e-10);
  const double c = s.x_max();
  for (std::size_t i = 1; i < s.H.size(); ++i) CHECK(s.H[i] > s.H[i - 1]);
  for (std::size_t i = 0; i < s.H.size(); ++i) {
    CHECK(s.H[i] * std::exp(s.phi * (c - s.x_at(i))) <= s.H.back() * (1.0 + 1e-9));
  }
  // On the tail H is a multiple of e^{Phi(q + 1) x}.
  CHECK(s.at(-5.0) / s.at(-3.0) == doctest::Approx(std::exp(-2.0 * cl.phi(q + 1.0))).epsilon(1e-6));
}

TEST_CASE("passage probabilities") {
  const auto s = solve(bm, 0.3, exp_omega(1.0, 1.0), -6.0, 2.0, 0.01, 1e-10);
  CHECK(passage_prob(s, 1.0, 1.0) == 1.0);
  for (double x : {-5.0, -1.3, 0.4}) {
    const double p = passage_prob(s, x, 1.7);
    CHECK(p > 0.0);
    CHECK(p < 1.0);
    CHECK(p == doctest::Approx(passage_prob(s, x, 0.9) * passage_prob(s, 0.9, 1.7)).epsilon(1e-10));
  }
  CHECK_THROWS_AS(passage_prob(s, 1.0, 0.5), ArgumentError);
  CHECK_THROWS_AS(passage_prob(s, -7.0, 0.5), RangeError);
}

TEST_CASE("solver preconditions") {
  CHECK_THROWS_AS(solve_picard(bm, 0.0, OmegaSpec::pure(TailConstant{1.0}), -5.0, 1.0, 0.01, 1e-8), UnsupportedError);
  CHECK_THROWS_AS(solve_volterra(bm, 0.0, OmegaSpec::pure(TailPowerExp{1.0, 1.0, 1}), -5.0, 1.0, 0.01, 1e-8),
                  UnsupportedError);
  const OmegaSpec late([](double) { return 1.0; }, TailConstant{1.0}, -2.0);
  CHECK_THROWS_AS(solve_volterra(bm, 0.0, late, -1.0, 1.0, 0.01, 1e-8), ConfigError);
  CHECK_THROWS_AS(solve_volterra(cl, 0.0, OmegaSpec::pure(TailConstant{1000.0}), -1.0, 1.0, 0.01, 1e-8),
                  StepSizeError);
  CHECK_THROWS_AS(solve(bm, 0.0, OmegaSpec::pure(TailZero{}), 0.5, 1.0, 0.01, 1e-8), ConfigError);
}

TEST_CASE("mixtures") {
  const auto one = mixture_build({{1.0, 1.0}}, bm, 0.0);
  const PatieSeries p(bm, 0.0, 1.0, 1.0);
  for (double x : {-3.0, 0.0, 1.0}) {
    CHECK(one.omega(x) == doctest::Approx(std::exp(x)).epsilon(1e-12));
    CHECK(one.H(x) == doctest::Approx(p.H(x)).epsilon(1e-14));
  }
  const auto two = mixture_build({{1.0, 0.5}, {2.0, 0.5}}, bm, 0.0);
  CHECK(two.H(0.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(two.L == doctest::Approx(0.5 * p.L() + 0.5 * PatieSeries(bm, 0.0, 2.0, 1.0).L()).epsilon(1e-14));
  CHECK_THROWS_AS(mixture_build({{1.0, 0.6}, {2.0, 0.6}}, bm, 0.0), ConfigError);
}

TEST_CASE("solver output is reproducible") {
  const auto w = exp_omega(0.8, 1.3);
  const auto a = solve_picard(cl, 0.4, w, -5.0, 1.0, 0.01, 1e-10);
  const auto b = solve_picard(cl, 0.4, w, -5.0, 1.0, 0.01, 1e-10);
  CHECK(a.H == b.H);
  CHECK(a.L == b.L);
}

TEST_CASE("Gregory weights integrate cubics exactly") {
  for (std::size_t n : {1u, 2u, 3u, 5u, 8u, 40u}) {
    double s = 0.0;
    for (std::size_t j = 0; j <= n; ++j) {
      const double t = static_cast<double>(j) / n;
      s += quadrature_weight(n, j) * t * t * t / n;
    }
    CAPTURE(n);
    if (n >= 2) CHECK(s == doctest::Approx(0.25).epsilon(1e-13));
    double ones = 0.0;
    for (std::size_t j = 0; j <= n; ++j) ones += quadrature_weight(n, j);
    CHECK(ones == doctest::Approx(static_cast<double>(n)).epsilon(1e-14));
  }
}
