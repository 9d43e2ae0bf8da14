#pragma once

#include <complex>
#include <string>
#include <variant>

namespace passage {

// X_t = mu t + sigma B_t.
struct BrownianDrift {
  double drift;
  double variance;
};

// X_t = c t + sigma B_t - (compound Poisson with rate lambda, Exp(eta) jumps).
struct CramerLundberg {
  double premium;
  double jump_rate;
  double eta;
  double variance = 0.0;
};

class LevyModel {
 public:
  using Family = std::variant<BrownianDrift, CramerLundberg>;

  explicit LevyModel(Family family);

  static LevyModel brownian(double drift, double variance) {
    return LevyModel(BrownianDrift{drift, variance});
  }
  static LevyModel cramer_lundberg(double premium, double jump_rate, double eta,
                                   double variance = 0.0) {
    return LevyModel(CramerLundberg{premium, jump_rate, eta, variance});
  }

  const Family& family() const noexcept { return family_; }
  bool is_brownian() const noexcept { return std::holds_alternative<BrownianDrift>(family_); }

  double variance() const noexcept;
  // Coefficient of theta in psi: mu or c.
  double linear_drift() const noexcept;
  double jump_rate() const noexcept;
  // Rate of the exponential jump sizes; 0 when there are no jumps.
  double jump_size_rate() const noexcept;
  bool bounded_variation() const noexcept { return variance() == 0.0; }

  double psi(double theta) const;
  std::complex<long double> psi(std::complex<long double> theta) const;
  double psi_prime(double theta) const;
  // Right derivative at 0; may be negative.
  double psi_prime_zero() const noexcept;

  // (psi(base + eps) - psi(base)) / eps without cancellation for tiny eps.
  double psi_slope(double base, double eps) const noexcept;
  std::complex<long double> psi_slope(long double base, std::complex<long double> eps) const;

  double phi(double p) const;
  double phi_zero() const noexcept { return phi_zero_; }
  // psi'(Phi(q)+); zero exactly in the critical case q = 0, psi'(0+) = 0.
  double psi_prime_at_phi(double q) const;
  bool critical() const noexcept { return phi_zero_ == 0.0 && psi_prime_zero() == 0.0; }

  std::string describe() const;

 private:
  Family family_;
  double phi_zero_ = 0.0;
};

}  // namespace passage
