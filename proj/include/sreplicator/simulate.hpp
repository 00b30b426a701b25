#pragma once

// Integrators for the replicator process. The stochastic one works in
// log-population coordinates, where the noise enters additively and the
// simplex constraint holds by construction.

#include "sreplicator/game.hpp"
#include "sreplicator/rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace sreplicator {

/// Raised when the integrator produces a non-finite state.
class NumericalError : public std::runtime_error {
 public:
  NumericalError(const std::string& what, std::uint64_t step) : std::runtime_error(what), step_(step) {}
  std::uint64_t step() const { return step_; }

 private:
  std::uint64_t step_;
};

struct SimConfig {
  explicit SimConfig(SimplexPoint start) : x0(std::move(start)) {}

  double dt = 1e-3;
  double t_final = 1.0;
  std::uint64_t seed = 1;
  std::size_t record_stride = 1;
  SimplexPoint x0;

  std::uint64_t steps() const { return static_cast<std::uint64_t>(std::llround(t_final / dt)); }

  /// Smallest stride that keeps at most max_points recorded states.
  static std::size_t default_stride(double t_final, double dt, std::size_t max_points = 1'000'000) {
    const double steps = std::round(t_final / dt);
    return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(steps / static_cast<double>(max_points))));
  }

  void validate() const {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw InvariantError("dt > 0");
    if (!(t_final >= dt) || !std::isfinite(t_final)) throw InvariantError("0 < dt <= t_final");
    if (record_stride < 1) throw InvariantError("record_stride >= 1");
    if (!x0.interior()) throw InvariantError("x0 lies in the interior of the simplex");
  }
};

/// Recorded path: times, states on the simplex and log-populations (defined
/// up to a common additive constant). Stored row-major, n values per record.
class Trajectory {
 public:
  explicit Trajectory(std::size_t n) : n_(n) {}

  std::size_t n() const { return n_; }
  std::size_t size() const { return times_.size(); }
  bool empty() const { return times_.empty(); }

  double time(std::size_t k) const { return times_[k]; }
  const std::vector<double>& times() const { return times_; }

  Eigen::Map<const Vector> state(std::size_t k) const {
    return Eigen::Map<const Vector>(states_.data() + k * n_, static_cast<Eigen::Index>(n_));
  }
  Eigen::Map<const Vector> log_pop(std::size_t k) const {
    return Eigen::Map<const Vector>(logs_.data() + k * n_, static_cast<Eigen::Index>(n_));
  }

  /// log X_i at record k, exact even when X_i underflows to zero.
  Vector log_state(std::size_t k) const {
    const auto l = log_pop(k);
    const double mx = l.maxCoeff();
    const double lse = mx + std::log((l.array() - mx).exp().sum());
    return (l.array() - lse).matrix();
  }

  void reserve(std::size_t records) {
    times_.reserve(records);
    states_.reserve(records * n_);
    logs_.reserve(records * n_);
  }

  void push(double t, const double* x, const double* log_pop) {
    times_.push_back(t);
    states_.insert(states_.end(), x, x + n_);
    logs_.insert(logs_.end(), log_pop, log_pop + n_);
  }

 private:
  std::size_t n_;
  std::vector<double> times_;
  std::vector<double> states_;
  std::vector<double> logs_;
};

/// Euler-Maruyama on d log Z_i = [(A X)_i - σ_i²/2] dt + σ_i dW_i, with the
/// common factor removed after every step. A is the effective payoff.
inline Trajectory simulate(const Game& game, const SimConfig& cfg) {
  cfg.validate();
  if (cfg.x0.n() != game.n()) throw InvariantError("x0 has length n");
  const std::size_t n = game.n();
  const Matrix a = effective_payoff(game);
  const Vector s2 = game.sigma_squared();
  const Vector& sig = game.sigma();
  const double dt = cfg.dt;
  const double sqdt = std::sqrt(dt);
  const std::uint64_t steps = cfg.steps();

  // Row-major copy of A for the inner loop.
  std::vector<double> arow(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) arow[i * n + j] = a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  std::vector<double> growth_shift(n), noise_scale(n);
  for (std::size_t i = 0; i < n; ++i) {
    growth_shift[i] = 0.5 * s2(static_cast<Eigen::Index>(i));
    noise_scale[i] = sig(static_cast<Eigen::Index>(i)) * sqdt;
  }

  std::vector<double> x(n), logz(n), z(n);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = cfg.x0[i];
    logz[i] = std::log(x[i]);
  }
  {
    const double mx = *std::max_element(logz.begin(), logz.end());
    for (auto& l : logz) l -= mx;
  }

  Trajectory traj(n);
  traj.reserve(static_cast<std::size_t>(steps / cfg.record_stride) + 2);
  traj.push(0.0, x.data(), logz.data());

  const rng::NormalStream noise(cfg.seed);
  for (std::uint64_t step = 1; step <= steps; ++step) {
    noise.fill(step - 1, n, z);
    for (std::size_t i = 0; i < n; ++i) {
      double ax = 0.0;
      const double* row = arow.data() + i * n;
      for (std::size_t j = 0; j < n; ++j) ax += row[j] * x[j];
      logz[i] += (ax - growth_shift[i]) * dt + noise_scale[i] * z[i];
    }
    double mx = logz[0];
    for (std::size_t i = 1; i < n; ++i) mx = std::max(mx, logz[i]);
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      logz[i] -= mx;
      x[i] = std::exp(logz[i]);
      total += x[i];
    }
    if (!std::isfinite(mx) || !std::isfinite(total)) {
      throw NumericalError("non-finite state at step " + std::to_string(step), step);
    }
    for (std::size_t i = 0; i < n; ++i) x[i] /= total;
    if (step % cfg.record_stride == 0 || step == steps) {
      traj.push(static_cast<double>(step) * dt, x.data(), logz.data());
    }
  }
  return traj;
}

/// Classical RK4 on the deterministic replicator equation
/// ξ'_i = ξ_i[(Aξ)_i - ξᵀAξ], renormalized after every step.
inline Trajectory simulate_deterministic(const Game& game, const SimplexPoint& x0, double t_final, double dt) {
  if (!x0.interior()) throw InvariantError("x0 lies in the interior of the simplex");
  if (x0.n() != game.n()) throw InvariantError("x0 has length n");
  if (!(dt > 0.0) || !(t_final >= dt)) throw InvariantError("0 < dt <= t_final");
  const Matrix a = effective_payoff(game);
  auto field = [&a](const Vector& xi) {
    const Vector ax = a * xi;
    return Vector(xi.cwiseProduct(ax) - xi.dot(ax) * xi);
  };
  const auto steps = static_cast<std::uint64_t>(std::llround(t_final / dt));
  Vector xi = x0.coords();
  Trajectory traj(game.n());
  traj.reserve(static_cast<std::size_t>(steps) + 1);
  Vector lx = xi.array().log().matrix();
  traj.push(0.0, xi.data(), lx.data());
  for (std::uint64_t step = 1; step <= steps; ++step) {
    const Vector k1 = field(xi);
    const Vector k2 = field(xi + 0.5 * dt * k1);
    const Vector k3 = field(xi + 0.5 * dt * k2);
    const Vector k4 = field(xi + dt * k3);
    xi += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    xi /= xi.sum();
    lx = xi.array().log().matrix();
    traj.push(static_cast<double>(step) * dt, xi.data(), lx.data());
  }
  return traj;
}

}  // namespace sreplicator
