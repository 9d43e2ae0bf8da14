#include <cmath>

#include "doctest.h"
#include "passage/errors.hpp"
#include "passage/levy_model.hpp"

using namespace passage;

namespace {
const LevyModel bm = LevyModel::brownian(0.0, 2.0);
const LevyModel cl = LevyModel::cramer_lundberg(1.5, 1.0, 1.0);
}  // namespace

TEST_CASE("psi closed forms") {
  CHECK(bm.psi(1.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(cl.psi(1.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(bm.psi(0.0) == 0.0);
  CHECK(cl.psi(0.0) == 0.0);
  CHECK(LevyModel::cramer_lundberg(1.5, 1.0, 1.0, 0.5).psi(0.0) == 0.0);
  CHECK_THROWS_AS(bm.psi(-1.0), DomainError);
}

TEST_CASE("psi derivative") {
  CHECK(bm.psi_prime(1.0) == doctest::Approx(2.0));
  CHECK(bm.psi_prime(0.5) == doctest::Approx(1.0));
  CHECK(cl.psi_prime(1.0) == doctest::Approx(1.25));
  CHECK_THROWS_AS(bm.psi_prime(0.0), DomainError);
  CHECK_THROWS_AS(cl.psi_prime(-0.5), DomainError);
  // The right derivative at zero is a limit and may be negative.
  CHECK(LevyModel::cramer_lundberg(0.5, 1.0, 1.0).psi_prime_zero() == doctest::Approx(-0.5));
}

TEST_CASE("phi inverts psi") {
  CHECK(bm.phi(4.0) == doctest::Approx(2.0).epsilon(1e-13));
  CHECK(cl.phi(1.0) == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(cl.phi(0.0) == 0.0);
  CHECK(LevyModel::brownian(0.3, 1.0).phi(0.0) == 0.0);

  // Negative mean: Phi(0) is the positive root of psi.
  CHECK(LevyModel::brownian(-1.0, 2.0).phi(0.0) == doctest::Approx(1.0).epsilon(1e-13));
  const auto ruin = LevyModel::cramer_lundberg(0.5, 1.0, 1.0);
  CHECK(ruin.phi(0.0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(ruin.phi(0.3) > ruin.phi(0.0));

  const auto mixed = LevyModel::cramer_lundberg(1.5, 1.0, 1.0, 0.5);
  CHECK(std::abs(mixed.psi(mixed.phi(1.0)) - 1.0) < 1e-12);
  CHECK_THROWS_AS(bm.phi(-1.0), DomainError);
}

TEST_CASE("critical case is flagged") {
  CHECK(bm.critical());
  CHECK(bm.psi_prime_at_phi(0.0) == 0.0);
  CHECK_FALSE(cl.critical());
  CHECK(bm.psi_prime_at_phi(1.0) == doctest::Approx(2.0));
}

TEST_CASE("invalid parameters") {
  CHECK_THROWS_AS(LevyModel::brownian(0.0, 0.0), ConfigError);
  CHECK_THROWS_AS(LevyModel::brownian(0.0, -1.0), ConfigError);
  CHECK_THROWS_AS(LevyModel::cramer_lundberg(-1.0, 1.0, 1.0), ConfigError);
  CHECK_THROWS_AS(LevyModel::cramer_lundberg(1.0, 1.0, 0.0), ConfigError);
  // Without jumps and without a Gaussian part paths would be monotone.
  CHECK_THROWS_AS(LevyModel::cramer_lundberg(1.0, 0.0, 1.0), ConfigError);
  CHECK_NOTHROW(LevyModel::cramer_lundberg(1.0, 0.0, 1.0, 0.5));
}

TEST_CASE("bounded variation only without a Gaussian part") {
  CHECK(cl.bounded_variation());
  CHECK_FALSE(bm.bounded_variation());
  CHECK_FALSE(LevyModel::cramer_lundberg(1.5, 1.0, 1.0, 0.5).bounded_variation());
}
