#include "passage/mc_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <mutex>
#include <random>
#include <thread>

#include "passage/errors.hpp"

namespace passage {
namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

struct Observation {
  double x;
  double integral;
  double t;
};

struct PathResult {
  bool passed = false;
  double tau = 0.0;
  double integral = 0.0;
  // exp(-kill I - q t) when the path stops unresolved, else 0.
  double residual = 0.0;
};

class Engine {
 public:
  Engine(const PathConfig& cfg, const OmegaSpec& omega, double kill, double q, double level, double t_stop,
         bool require_positive)
      : cfg_(cfg), omega_(omega), kill_(kill), q_(q), level_(level), t_stop_(t_stop), positive_(require_positive) {
    sigma2_ = cfg.model.variance();
    sigma_ = std::sqrt(sigma2_);
    mu_ = cfg.model.linear_drift();
    lambda_ = cfg.model.jump_rate();
    eta_ = cfg.model.jump_size_rate();
    omega_level_ = rate(level);
  }

  PathResult run(std::uint64_t index, double x0, const std::vector<double>* obs, std::vector<Observation>* rec) const {
    std::mt19937_64 rng(splitmix64(cfg_.seed ^ splitmix64(index)));
    std::normal_distribution<double> normal;
    std::uniform_real_distribution<double> uniform;
    std::exponential_distribution<double> jump_time(lambda_ > 0.0 ? lambda_ : 1.0);
    std::exponential_distribution<double> jump_size(eta_ > 0.0 ? eta_ : 1.0);

    PathResult r;
    double x = x0;
    double t = 0.0;
    double I = 0.0;
    std::size_t next_obs = 0;
    auto record_until = [&](double time, double xv, double Iv) {
      while (obs && next_obs < obs->size() && (*obs)[next_obs] <= time) {
        (*rec)[next_obs] = {xv, Iv, (*obs)[next_obs]};
        ++next_obs;
      }
    };
    auto pass = [&](double tau, double integral) {
      r.passed = true;
      r.tau = tau;
      r.integral = integral;
      if (obs) {
        for (; next_obs < obs->size(); ++next_obs) (*rec)[next_obs] = {level_, integral, tau};
      }
      return r;
    };
    if (x >= level_) return pass(0.0, 0.0);
    record_until(0.0, x, 0.0);

    double next_jump = lambda_ > 0.0 ? jump_time(rng) : INFINITY;
    double wx = rate(x);
    for (;;) {
      double stop = std::min(t_stop_, next_jump);
      if (obs && next_obs < obs->size()) stop = std::min(stop, (*obs)[next_obs]);
      const double room = stop - t;

      if (room > 0.0) {
        if (sigma2_ > 0.0) {
          const double d = level_ - x;
          double delta = std::min({cfg_.kappa * d * d / sigma2_, cfg_.dt_max, cfg_.weight_step / (kill_ * wx + q_)});
          delta = std::min(std::max(delta, cfg_.dt), room);
          const double hs = 0.5 * delta;
          const double sd = sigma_ * std::sqrt(hs);
          const double xm = x + mu_ * hs + sd * normal(rng);
          const double xe = xm + mu_ * hs + sd * normal(rng);
          const double wm = rate(xm);
          const bool cross1 = xm >= level_ || uniform(rng) < std::exp(-2.0 * (level_ - x) * (level_ - xm) / (sigma2_ * hs));
          if (cross1) return pass(t + 0.5 * hs, I + 0.25 * hs * (wx + omega_level_));
          const bool cross2 = xe >= level_ || uniform(rng) < std::exp(-2.0 * (level_ - xm) * (level_ - xe) / (sigma2_ * hs));
          if (cross2) {
            return pass(t + 1.5 * hs, I + 0.5 * hs * (wx + wm) + 0.25 * hs * (wm + omega_level_));
          }
          const double we = rate(xe);
          I += delta / 6.0 * (wx + 4.0 * wm + we);
          x = xe;
          wx = we;
          t += delta;
        } else {
          // Deterministic ramp at speed c until the next event.
          const double hit = (level_ - x) / mu_;
          if (hit <= room) return pass(t + hit, I + ramp_integral(x, level_));
          const double xe = x + mu_ * room;
          I += ramp_integral(x, xe);
          x = xe;
          wx = rate(x);
          t += room;
        }
      }
      if (t >= next_jump) {
        x -= jump_size(rng);
        wx = rate(x);
        next_jump = t + jump_time(rng);
      }
      record_until(t, x, I);
      const double w = std::exp(-kill_ * I - q_ * t);
      if (t >= t_stop_ || w < cfg_.weight_floor) {
        r.residual = w;
        r.integral = I;
        r.tau = t;
        return r;
      }
    }
  }

 private:
  double rate(double x) const {
    const double v = omega_(x);
    if (positive_ && !(v > 0.0)) throw DomainError("time change needs omega > 0 along the path");
    return v;
  }

  // int along the ramp from a to b at speed c, composite Simpson with spacing <= 0.05.
  double ramp_integral(double a, double b) const {
    const double len = b - a;
    if (len <= 0.0) return 0.0;
    const int m = 2 * std::max(1, static_cast<int>(std::ceil(len / 0.1)));
    const double step = len / m;
    double s = rate(a) + rate(b);
    for (int k = 1; k < m; ++k) s += (k % 2 ? 4.0 : 2.0) * rate(a + k * step);
    return s * step / 3.0 / mu_;
  }

  const PathConfig& cfg_;
  const OmegaSpec& omega_;
  double kill_, q_, level_, t_stop_;
  bool positive_;
  double sigma2_ = 0.0, sigma_ = 0.0, mu_ = 0.0, lambda_ = 0.0, eta_ = 0.0;
  double omega_level_ = 0.0;
};

// Runs fn(i) for i in [0, n) on cfg.threads workers; results are written by
// index, so the outcome does not depend on the thread count.
template <class Fn>
void for_each_path(std::size_t n, unsigned threads, Fn fn) {
  threads = std::max(1u, threads);
  if (threads == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::exception_ptr error;
  std::mutex mu;
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < threads; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < n; i += threads) fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(mu);
        if (!error) error = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

void validate(const PathConfig& cfg, double q, double t_max) {
  if (!(q >= 0.0) || !std::isfinite(q)) throw ConfigError("mc: q must be finite and >= 0");
  if (cfg.n_paths < 2) throw ConfigError("mc: need at least 2 paths");
  if (!(cfg.dt > 0.0) || !(cfg.dt_max >= cfg.dt)) throw ConfigError("mc: need 0 < dt <= dt_max");
  if (!(t_max > 0.0) || !std::isfinite(t_max)) throw ConfigError("mc: t_max must be > 0");
  if (cfg.model.variance() > 0.0 && cfg.dt > 1e-3 * t_max) throw ConfigError("mc: dt must be <= 1e-3 t_max");
}

MCEstimate summarize(const std::vector<double>& v, const std::vector<double>& residual, const PathConfig& cfg) {
  const auto n = static_cast<double>(v.size());
  double sum = 0.0;
  for (double a : v) sum += a;
  const double mean = sum / n;
  double ss = 0.0;
  for (double a : v) ss += (a - mean) * (a - mean);
  double bias = 0.0;
  for (double a : residual) bias += a;
  MCEstimate e;
  e.mean = mean;
  e.std_error = std::sqrt(ss / (n - 1.0) / n);
  e.n_paths = v.size();
  e.horizon_bias_bound = bias / n;
  e.seed = cfg.seed;
  return e;
}

void check_bias(const MCEstimate& e, const PathConfig& cfg) {
  if (e.horizon_bias_bound > cfg.bias_budget) {
    throw HorizonError("mc: horizon bias bound " + std::to_string(e.horizon_bias_bound) + " exceeds budget " +
                       std::to_string(cfg.bias_budget) + "; raise t_max");
  }
}

MCEstimate run_passage(const PathConfig& cfg, double q, const OmegaSpec& omega, double kill, double x, double c,
                       bool positive) {
  if (x > c) throw ArgumentError("mc: need x <= c");
  const double t_max = cfg.t_max > 0.0 ? cfg.t_max : default_horizon(cfg.model, q);
  validate(cfg, q, t_max);
  const Engine engine(cfg, omega, kill, q, c, t_max, positive);
  std::vector<double> v(cfg.n_paths, 0.0);
  std::vector<double> res(cfg.n_paths, 0.0);
  for_each_path(cfg.n_paths, cfg.threads, [&](std::size_t i) {
    const PathResult r = engine.run(i, x, nullptr, nullptr);
    v[i] = r.passed ? std::exp(-kill * r.integral - q * r.tau) : 0.0;
    res[i] = r.residual;
  });
  MCEstimate e = summarize(v, res, cfg);
  check_bias(e, cfg);
  return e;
}

}  // namespace

double default_horizon(const LevyModel& model, double q) {
  return 50.0 / std::max({q, std::abs(model.psi_prime_zero()), 0.02});
}

MCEstimate estimate_B(const PathConfig& cfg, double q, const OmegaSpec& omega, double x, double c) {
  return run_passage(cfg, q, omega, 1.0, x, c, false);
}

MCEstimate estimate_timechange_laplace(const PathConfig& cfg, double q, const OmegaSpec& omega, double gamma,
                                       double y, double d) {
  if (!(gamma > 0.0)) throw ConfigError("mc: gamma must be > 0");
  return run_passage(cfg, q, omega, gamma, y, d, true);
}

MartingaleResult martingale_check(const PathConfig& cfg, double q, const OmegaSpec& omega, const KillSolution& H,
                                  double x, double c, const std::vector<double>& times) {
  if (x > c) throw ArgumentError("martingale_check: need x <= c");
  if (times.empty()) throw ConfigError("martingale_check: need at least one time");
  if (c > H.x_max() + 1e-12) throw RangeError("martingale_check: H does not cover [x, c]");
  std::vector<double> obs = times;
  std::sort(obs.begin(), obs.end());
  const double t_max = cfg.t_max > 0.0 ? cfg.t_max : default_horizon(cfg.model, q);
  validate(cfg, q, t_max);
  if (obs.front() < 0.0) throw ConfigError("martingale_check: times must be >= 0");
  if (obs.back() > t_max) throw HorizonError("martingale_check: time beyond t_max");

  // Below the solved grid H is continued by its Phi(q)-exponential envelope.
  auto Hx = [&](double y) {
    if (y >= H.x_min) return H.at(std::min(y, H.x_max()));
    return H.H.front() * std::exp(H.phi * (y - H.x_min));
  };
  const Engine engine(cfg, omega, 1.0, q, c, obs.back(), false);
  const std::size_t k = obs.size();
  std::vector<std::vector<double>> z(k, std::vector<double>(cfg.n_paths, 0.0));
  std::vector<double> res(cfg.n_paths, 0.0);
  for_each_path(cfg.n_paths, cfg.threads, [&](std::size_t i) {
    std::vector<Observation> rec(k, Observation{0.0, 0.0, -1.0});
    engine.run(i, x, &obs, &rec);
    for (std::size_t j = 0; j < k; ++j) {
      // t = -1 marks a path that stopped on the weight floor before this time.
      if (rec[j].t < 0.0) continue;
      z[j][i] = std::exp(-rec[j].integral - q * rec[j].t) * Hx(rec[j].x);
    }
  });
  // Map back to the caller's order.
  MartingaleResult out;
  std::vector<std::size_t> order(k);
  for (std::size_t j = 0; j < k; ++j) {
    order[j] = static_cast<std::size_t>(std::lower_bound(obs.begin(), obs.end(), times[j]) - obs.begin());
  }
  for (std::size_t j = 0; j < k; ++j) out.at.push_back(summarize(z[order[j]], res, cfg));
  out.diff_mean.assign(k, std::vector<double>(k, 0.0));
  out.diff_std_error.assign(k, std::vector<double>(k, 0.0));
  std::vector<double> d(cfg.n_paths);
  for (std::size_t a = 0; a < k; ++a) {
    for (std::size_t b = 0; b < k; ++b) {
      for (std::size_t i = 0; i < cfg.n_paths; ++i) d[i] = z[order[a]][i] - z[order[b]][i];
      const MCEstimate e = summarize(d, res, cfg);
      out.diff_mean[a][b] = e.mean;
      out.diff_std_error[a][b] = e.std_error;
    }
  }
  return out;
}

}  // namespace passage
