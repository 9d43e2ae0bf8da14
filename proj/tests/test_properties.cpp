// Randomized checks of structural identities across modules.
#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "passage/closed_forms.hpp"
#include "passage/kill_solver.hpp"
#include "passage/scale_fn.hpp"

using namespace passage;

namespace {

std::vector<LevyModel> models() {
  return {LevyModel::brownian(0.0, 2.0), LevyModel::brownian(-0.7, 1.3), LevyModel::brownian(1.2, 0.4),
          LevyModel::cramer_lundberg(1.5, 1.0, 1.0), LevyModel::cramer_lundberg(0.5, 1.0, 1.0),
          LevyModel::cramer_lundberg(2.0, 3.0, 0.5, 0.7)};
}

}  // namespace

TEST_CASE("Phi inverts psi on random arguments") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> log_p(-8.0, 4.0);
  for (const auto& m : models()) {
    double prev_p = -1.0, prev_phi = -1.0;
    std::vector<double> ps(1000);
    for (auto& p : ps) p = std::pow(10.0, log_p(rng));
    std::sort(ps.begin(), ps.end());
    for (double p : ps) {
      const double phi = m.phi(p);
      CHECK(std::abs(m.psi(phi) - p) <= 1e-9 * (1.0 + p));
      if (p > prev_p) CHECK(phi > prev_phi);
      prev_p = p;
      prev_phi = phi;
    }
  }
}

TEST_CASE("psi is convex") {
  for (const auto& m : models()) {
    for (double t = 0.0; t < 10.0; t += 0.1) {
      CHECK(m.psi(t + 0.05) <= 0.5 * (m.psi(t) + m.psi(t + 0.1)) + 1e-12);
    }
  }
}

TEST_CASE("scale grids are monotone") {
  for (const auto& m : models()) {
    for (double q : {0.0, 0.5}) {
      const auto g = scale_build(m, q, 10.0, 0.01);
      const auto& w = g.values();
      for (std::size_t k = 1; k < w.size(); ++k) {
        CHECK(w[k] >= 0.0);
        CHECK(w[k] >= w[k - 1]);
      }
      if (q > 0.0) {
        for (double x = 0.0; x + 0.01 <= 10.0; x += 0.01) CHECK(g.tilted(x + 0.01) >= g.tilted(x) * (1.0 - 1e-12));
      }
    }
  }
}

TEST_CASE("resolvent identity for scale functions") {
  // W^{(p+q)} = W^{(q)} + p W^{(p+q)} * W^{(q)}
  for (const auto& m : models()) {
    const double q = 0.3, p = 0.8, h = 0.005, x_max = 4.0;
    const auto a = scale_build(m, q, x_max, h);
    const auto b = scale_build(m, p + q, x_max, h);
    const auto n = a.size() - 1;
    for (std::size_t i = 1; i <= n / 2; i += 7) {
      double conv = 0.0;
      for (std::size_t j = 0; j <= i; ++j) conv += quadrature_weight(i, j) * b.values()[j] * a.values()[i - j];
      conv *= h;
      const double lhs = b.values()[i];
      CHECK(std::abs(lhs - a.values()[i] - p * conv) <= 1e-4 * lhs);
    }
  }
}

TEST_CASE("Patie series identities") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.2, 2.0);
  for (const auto& m : models()) {
    const double q = u(rng) - 0.2, alpha = u(rng), gamma = u(rng), s = u(rng) - 1.0;
    const PatieSeries p(m, q, alpha, gamma);
    const PatieSeries shifted(m, q, alpha, gamma * std::exp(alpha * s));
    CHECK(p.H(0.0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(p.L() > 0.0);
    CHECK(p.L() <= 1.0);
    for (double x : {-3.0, -0.5, 0.4}) {
      CHECK(p.H(x + s) / p.H(s) == doctest::Approx(shifted.H(x)).epsilon(1e-12));
      // Stronger killing lowers H left of 0 and raises it to the right.
      const PatieSeries more(m, q, alpha, 1.5 * gamma);
      if (x < 0.0) CHECK(more.H(x) <= p.H(x));
      if (x > 0.0) CHECK(more.H(x) >= p.H(x));
    }
  }
}
