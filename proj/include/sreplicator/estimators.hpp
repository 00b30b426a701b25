#pragma once

// Ergodic quantities from recorded trajectories: time averages, encounter
// (co-occurrence) matrices, regret-style residuals, boundary diagnostics and
// moment checks against Dirichlet invariant laws. All time integrals use the
// trapezoid rule on the recorded grid.

#include "sreplicator/analysis.hpp"
#include "sreplicator/game.hpp"
#include "sreplicator/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

namespace sreplicator {

namespace detail {

struct Window {
  std::size_t first;
  std::size_t last;  // inclusive
};

inline Window window(const Trajectory& traj, double from, double until) {
  const auto& t = traj.times();
  const auto lo = std::lower_bound(t.begin(), t.end(), from - 1e-12);
  const auto hi = std::upper_bound(t.begin(), t.end(), until + 1e-12);
  if (lo >= hi || std::distance(lo, hi) < 2)
    throw std::invalid_argument("time window needs at least 2 recorded points after burn-in");
  return {static_cast<std::size_t>(lo - t.begin()), static_cast<std::size_t>(hi - t.begin()) - 1};
}

// Trapezoid weight of record k inside the window.
inline double trapezoid_weight(const Trajectory& traj, const Window& w, std::size_t k) {
  const double left = k > w.first ? traj.time(k) - traj.time(k - 1) : 0.0;
  const double right = k < w.last ? traj.time(k + 1) - traj.time(k) : 0.0;
  return 0.5 * (left + right);
}

}  // namespace detail

inline SimplexPoint time_average(const Trajectory& traj, double burn_in,
                                 double until = std::numeric_limits<double>::infinity()) {
  const auto w = detail::window(traj, burn_in, until);
  Vector acc = Vector::Zero(static_cast<Eigen::Index>(traj.n()));
  double total = 0.0;
  for (std::size_t k = w.first; k <= w.last; ++k) {
    const double wk = detail::trapezoid_weight(traj, w, k);
    acc += wk * traj.state(k);
    total += wk;
  }
  return SimplexPoint::normalized(acc / total);
}

struct CooccurrenceMatrix {
  Matrix p;
  Vector marginals;
};

/// Time average of the products X_i X_j.
inline CooccurrenceMatrix cooccurrence(const Trajectory& traj, double burn_in,
                                       double until = std::numeric_limits<double>::infinity()) {
  const auto w = detail::window(traj, burn_in, until);
  const auto n = static_cast<Eigen::Index>(traj.n());
  Matrix acc = Matrix::Zero(n, n);
  double total = 0.0;
  for (std::size_t k = w.first; k <= w.last; ++k) {
    const double wk = detail::trapezoid_weight(traj, w, k);
    const auto x = traj.state(k);
    acc.selfadjointView<Eigen::Lower>().rankUpdate(x, wk);
    total += wk;
  }
  Matrix p = acc.selfadjointView<Eigen::Lower>();
  p /= total;
  // Normalize so that Σ p_ij = 1; the marginals then agree with time_average.
  const double mass = p.sum();
  p /= mass;
  Vector marg = p.rowwise().sum();
  return CooccurrenceMatrix{std::move(p), std::move(marg)};
}

/// r_l = [Σ ã_ij p_ij + ½ Σ σ_j² (p_j - p_jj)] - (Ã p)_l with p the marginals.
/// Limit points satisfy r_l >= 0 with equality for some l; for positive
/// recurrent processes equality holds for every l.
inline Vector hannan_residuals(const ModifiedGame& mg, const CooccurrenceMatrix& cm) {
  const Matrix& at = mg.atilde;
  const Vector s2 = mg.sigma.array().square().matrix();
  const double encounter = at.cwiseProduct(cm.p).sum();
  const double noise = 0.5 * s2.dot(cm.marginals - cm.p.diagonal());
  return (Vector::Constant(at.rows(), encounter + noise) - at * cm.marginals);
}

struct BoundaryDiagnostics {
  double min_final = 1.0;       // min_i X_i(T)
  double min_log_final = 0.0;   // min_i log X_i(T)
  Vector log_final;             // log X_i(T)
  Vector log_slope;             // least-squares slope of log X_i(t), last half of run
};

inline BoundaryDiagnostics boundary_diagnostics(const Trajectory& traj) {
  if (traj.size() < 2) throw std::invalid_argument("boundary diagnostics need at least 2 recorded points");
  const std::size_t n = traj.n();
  const std::size_t last = traj.size() - 1;
  BoundaryDiagnostics out;
  out.log_final = traj.log_state(last);
  out.min_log_final = out.log_final.minCoeff();
  out.min_final = std::exp(out.min_log_final);

  const double t_half = 0.5 * traj.time(last);
  std::size_t first = static_cast<std::size_t>(
      std::lower_bound(traj.times().begin(), traj.times().end(), t_half) - traj.times().begin());
  first = std::min(first, last - 1);
  const double m = static_cast<double>(last - first + 1);
  double st = 0.0, stt = 0.0;
  Vector sy = Vector::Zero(static_cast<Eigen::Index>(n)), sty = Vector::Zero(static_cast<Eigen::Index>(n));
  for (std::size_t k = first; k <= last; ++k) {
    const double t = traj.time(k);
    const Vector ly = traj.log_state(k);
    st += t;
    stt += t * t;
    sy += ly;
    sty += t * ly;
  }
  const double denom = m * stt - st * st;
  out.log_slope = (m * sty - st * sy) / denom;
  return out;
}

struct DirichletCheck {
  Vector empirical_mean;
  Vector empirical_variance;
  Vector target_mean;
  Vector target_variance;
  Vector z_mean;      // (empirical - target) / batch-means standard error
  Vector z_variance;
  std::size_t samples = 0;

  double max_abs_z() const { return std::max(z_mean.cwiseAbs().maxCoeff(), z_variance.cwiseAbs().maxCoeff()); }
};

/// Treats thinned post-burn-in records as draws from the invariant law and
/// compares per-coordinate mean and variance with the Dirichlet moments.
inline DirichletCheck dirichlet_moment_check(const Trajectory& traj, const DirichletParams& params, double burn_in,
                                             std::size_t thin = 1, std::size_t batches = 32) {
  if (thin < 1 || batches < 2) throw std::invalid_argument("thin >= 1 and batches >= 2");
  const auto n = static_cast<Eigen::Index>(traj.n());
  std::vector<std::size_t> idx;
  for (std::size_t k = 0; k < traj.size(); ++k) {
    if (traj.time(k) >= burn_in && (k % thin) == 0) idx.push_back(k);
  }
  if (idx.size() < 2 * batches) throw std::invalid_argument("too few samples for the requested batch count");

  const auto moments = dirichlet_moments(params);
  const std::size_t per_batch = idx.size() / batches;
  const std::size_t used = per_batch * batches;

  Vector mean = Vector::Zero(n);
  for (std::size_t s = 0; s < used; ++s) mean += traj.state(idx[s]);
  mean /= static_cast<double>(used);

  Vector var = Vector::Zero(n);
  Matrix batch_mean = Matrix::Zero(n, static_cast<Eigen::Index>(batches));
  Matrix batch_sq = Matrix::Zero(n, static_cast<Eigen::Index>(batches));
  for (std::size_t s = 0; s < used; ++s) {
    const Vector x = traj.state(idx[s]);
    const Vector dev2 = (x - mean).array().square().matrix();
    var += dev2;
    const auto b = static_cast<Eigen::Index>(s / per_batch);
    batch_mean.col(b) += x;
    batch_sq.col(b) += dev2;
  }
  var /= static_cast<double>(used);
  batch_mean /= static_cast<double>(per_batch);
  batch_sq /= static_cast<double>(per_batch);

  const double nb = static_cast<double>(batches);
  auto standard_error = [nb](const Matrix& bm, const Vector& centre) {
    Vector se(bm.rows());
    for (Eigen::Index i = 0; i < bm.rows(); ++i) {
      const double ss = (bm.row(i).array() - centre(i)).square().sum();
      se(i) = std::sqrt(ss / (nb - 1.0) / nb);
    }
    return se;
  };
  const Vector se_mean = standard_error(batch_mean, mean);
  const Vector se_var = standard_error(batch_sq, var);

  DirichletCheck out;
  out.empirical_mean = mean;
  out.empirical_variance = var;
  out.target_mean = moments.mean;
  out.target_variance = moments.variance;
  out.z_mean = ((mean - moments.mean).array() / se_mean.array()).matrix();
  out.z_variance = ((var - moments.variance).array() / se_var.array()).matrix();
  out.samples = used;
  return out;
}

/// Euclidean distance from y to the affine solution set of the equalizer
/// system (ignoring the simplex constraint); +inf when that set is empty.
inline double distance_to_equalizers(const EqualizerResult& eq, const Vector& y) {
  if (eq.kind == EqualizerKind::Empty) return std::numeric_limits<double>::infinity();
  const Vector r = y - eq.point;
  if (eq.kind == EqualizerKind::UniquePoint) return r.norm();
  const Matrix q = detail::orthonormal_columns(eq.basis, y.size());
  return (r - q * (q.transpose() * r)).norm();
}

struct TimescaleSample {
  double time = 0.0;
  Vector condition;          // |log X_i(T_k)| / T_k
  bool satisfied = false;    // every component below the threshold
  Vector partial_average;    // (1/T_k) ∫_0^T_k X dt
  double distance_to_equalizers = 0.0;
};

struct TimescaleReport {
  std::vector<TimescaleSample> samples;
  Vector max_condition;      // per strategy, over all samples
  bool tail_satisfied = false;  // condition holds on the last half of the samples
};

/// Evaluates the vanishing condition log X_i(T_k)/T_k -> 0 along a grid and
/// the distance of the partial averages to the equalizer set.
inline TimescaleReport timescale_condition(const Trajectory& traj, const std::vector<double>& sample_times,
                                           double threshold, const EqualizerResult& eq) {
  TimescaleReport rep;
  rep.max_condition = Vector::Zero(static_cast<Eigen::Index>(traj.n()));
  const auto& t = traj.times();
  for (const double tk : sample_times) {
    if (!(tk > 0.0) || tk > t.back() + 1e-9) throw std::invalid_argument("sample times lie in (0, T]");
    const auto it = std::upper_bound(t.begin(), t.end(), tk + 1e-12);
    const auto k = static_cast<std::size_t>(it - t.begin()) - 1;
    TimescaleSample s;
    s.time = t[k];
    s.condition = traj.log_state(k).cwiseAbs() / s.time;
    s.satisfied = (s.condition.array() < threshold).all();
    s.partial_average = time_average(traj, 0.0, s.time).coords();
    s.distance_to_equalizers = distance_to_equalizers(eq, s.partial_average);
    rep.max_condition = rep.max_condition.cwiseMax(s.condition);
    rep.samples.push_back(std::move(s));
  }
  rep.tail_satisfied = !rep.samples.empty();
  for (std::size_t k = rep.samples.size() / 2; k < rep.samples.size(); ++k)
    rep.tail_satisfied = rep.tail_satisfied && rep.samples[k].satisfied;
  return rep;
}

}  // namespace sreplicator
