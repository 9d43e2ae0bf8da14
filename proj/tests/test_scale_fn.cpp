#include <cmath>

#include "doctest.h"
#include "passage/errors.hpp"
#include "passage/scale_fn.hpp"

using namespace passage;

namespace {
const LevyModel bm = LevyModel::brownian(0.0, 2.0);
const LevyModel cl = LevyModel::cramer_lundberg(1.5, 1.0, 1.0);
const LevyModel mixed = LevyModel::cramer_lundberg(1.5, 1.0, 1.0, 0.5);
}  // namespace

TEST_CASE("Brownian scale functions") {
  const auto w0 = scale_build(bm, 0.0, 10.0, 0.01);
  CHECK(w0.eval(1.0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(w0.eval(-1.0) == 0.0);
  CHECK(w0.eval(-5.0) == 0.0);
  CHECK(w0.eval(0.0) == 0.0);

  const auto w1 = scale_build(bm, 1.0, 40.0, 0.01);
  for (double x : {0.1, 0.5, 1.0, 3.7, 10.0}) CHECK(w1.eval(x) == doctest::Approx(std::sinh(x)).epsilon(1e-5));
  CHECK(laplace_residual(w1, 2.0, 40.0) <= 1e-8);
  // Node values are exact; interpolation error is O(h^2).
  CHECK(w1.values()[100] == doctest::Approx(std::sinh(1.0)).epsilon(1e-14));
}

TEST_CASE("bounded variation starts at 1/c") {
  const auto w = scale_build(cl, 0.0, 10.0, 0.01);
  CHECK(w.eval(0.0) == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
}

TEST_CASE("tilted scale function") {
  const auto w = scale_build(bm, 1.0, 40.0, 0.01);
  CHECK(w.tilted(0.0) == w.eval(0.0));
  CHECK(w.tilted(40.0) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(w.tail_amplitude() == doctest::Approx(0.5));
  for (int k = 0; k + 37 <= 4000; k += 37) CHECK(w.tilted(0.01 * k) <= w.tilted(0.01 * (k + 37)) * (1.0 + 1e-12));
  CHECK_THROWS_AS(w.tilted(-1.0), DomainError);
}

TEST_CASE("laplace residual examples") {
  CHECK(laplace_residual(scale_build(bm, 0.0, 40.0, 0.01), 1.0, 40.0) <= 1e-6);
  CHECK(laplace_residual(scale_build(bm, 1.0, 40.0, 0.01), 2.0, 40.0) <= 1e-6);
  CHECK(laplace_residual(scale_build(cl, 0.0, 60.0, 0.01), 2.0, 60.0) <= 1e-5);
  const auto g = scale_build(mixed, 1.0, 60.0, 0.01);
  CHECK(laplace_residual(g, g.tail_slope() + 1.0, 60.0) <= 1e-6);
}

TEST_CASE("scale errors") {
  CHECK_THROWS_AS(scale_build(bm, 0.0, 1.0, 0.2), ConfigError);
  const auto g = scale_build(bm, 0.0, 10.0, 0.1);
  CHECK_THROWS_AS(g.eval(10.5), RangeError);
  CHECK_THROWS_AS(laplace_residual(g, 0.05, 10.0), DomainError);
  CHECK_THROWS_AS(laplace_residual(g, 1.0, 11.0), RangeError);
  // Past the grid the exponential asymptote needs a finite amplitude.
  CHECK_THROWS_AS(g.extended(20.0), RangeError);
  const auto g1 = scale_build(bm, 1.0, 10.0, 0.1);
  CHECK(g1.extended(20.0) == doctest::Approx(std::exp(20.0) / 2.0).epsilon(1e-12));
}

TEST_CASE("Talbot inversion matches the exponential sum") {
  for (double q : {0.0, 1.0}) {
    const ScaleExpansion w(mixed, q);
    for (double x : {0.01, 0.3, 2.0, 15.0}) {
      CHECK(talbot_scale(mixed, q, x) == doctest::Approx(w(x)).epsilon(1e-12));
    }
  }
  const auto a = scale_build(mixed, 0.5, 10.0, 0.1, ScaleMethod::Talbot);
  const auto b = scale_build(mixed, 0.5, 10.0, 0.1, ScaleMethod::ClosedForm);
  for (std::size_t k = 0; k < a.size(); ++k) CHECK(a.values()[k] == doctest::Approx(b.values()[k]).epsilon(1e-12));
}

TEST_CASE("exponential-sum tail integrals") {
  // W(u) = u for psi = s^2, q = 0: int_{-inf}^0 e^{2y} (x - y) dy = x/2 + 1/4.
  const ScaleExpansion w(bm, 0.0);
  CHECK(w.exp_tail_integral(2.0, 1.0, 0.0) == doctest::Approx(0.75).epsilon(1e-14));
  // int_0^inf e^{-t} W(1 + t) dt = 2
  CHECK(w.upper_laplace(1.0, 1.0) == doctest::Approx(2.0).epsilon(1e-14));
}
