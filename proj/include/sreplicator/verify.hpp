#pragma once

// Monte Carlo battery that ties simulated paths to the classification of a
// game. Which checks run depends on the label: every game gets the Hannan
// residual bounds; positive recurrent games are compared with their interior
// equilibrium and Dirichlet law; transient games must approach the boundary;
// strict pure equilibria must be locally stable; dominated strategies must
// vanish.

#include "sreplicator/batch.hpp"
#include "sreplicator/classify.hpp"
#include "sreplicator/estimators.hpp"
#include "sreplicator/rng.hpp"
#include "sreplicator/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace sreplicator {

struct VerifyThresholds {
  double time_average = 0.02;      // sup-norm distance of the pooled time average to the equilibrium
  double variance_relative = 0.15;  // pooled variance vs Dirichlet variance
  double hannan = 0.02;
  double max_z = 5.0;               // Dirichlet moment z-scores, every run
  double boundary_level = 1e-6;
  double fraction = 0.9;            // share of runs that must show the expected behavior
  double stability_start = 0.05;    // Euclidean distance of the start from the vertex
  double stability_radius = 0.2;
  double stability_target = 1e-4;
};

struct VerifyOptions {
  std::size_t runs = 8;
  double t_final = 1e4;
  std::uint64_t seed_base = 1;
  double dt = 1e-3;
  double burn_in = -1.0;  // < 0 selects 1% of the horizon
  std::size_t stride = 100;
  std::size_t stability_runs = 20;
  double stability_t_final = 500.0;
  std::size_t workers = 0;
  double tol = kDefaultTol;
  VerifyThresholds thresholds;

  double resolved_burn_in() const { return burn_in < 0.0 ? 0.01 * t_final : burn_in; }
};

struct Check {
  std::string name;
  bool passed = false;
  double value = 0.0;
  double threshold = 0.0;
  std::string detail;
};

struct VerifyReport {
  ClassificationReport classification;
  std::vector<Check> checks;
  std::vector<std::uint64_t> seeds;

  bool passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
  }
};

namespace detail {

struct VerifyRun {
  RunSummary summary;
  std::optional<DirichletCheck> dirichlet;
};

struct StabilityRun {
  double max_distance = 0.0;
  double final_distance = 0.0;
};

inline Vector stability_start(std::size_t n, std::size_t k, double distance) {
  Vector e = Vector::Zero(static_cast<Eigen::Index>(n));
  e(static_cast<Eigen::Index>(k)) = 1.0;
  const Vector toward = Vector::Constant(static_cast<Eigen::Index>(n), 1.0 / static_cast<double>(n)) - e;
  return e + distance * toward / toward.norm();
}

// Seeds for the stability runs of vertex k are kept apart from the main runs.
inline std::uint64_t stability_seed(std::uint64_t seed_base, std::size_t k, std::size_t r) {
  return rng::derive_seed(rng::splitmix64(seed_base ^ (0x5354414Bull + k)), r);
}

inline double fraction(std::size_t hits, std::size_t total) {
  return total == 0 ? 0.0 : static_cast<double>(hits) / static_cast<double>(total);
}

}  // namespace detail

inline VerifyReport verify(const Game& game, const VerifyOptions& opt) {
  if (opt.runs < 1) throw InvariantError("runs >= 1");
  VerifyReport rep;
  rep.classification = classify(game, opt.tol);
  const ClassificationReport& cls = rep.classification;
  const VerifyThresholds& th = opt.thresholds;
  const std::size_t n = game.n();
  const auto ni = static_cast<Eigen::Index>(n);
  const double burn_in = opt.resolved_burn_in();

  std::optional<DirichletParams> params;
  if (cls.label == Label::PositiveRecurrent && cls.certificate.dirichlet) params = cls.certificate.dirichlet;

  SimConfig cfg(SimplexPoint::barycenter(n));
  cfg.dt = opt.dt;
  cfg.t_final = opt.t_final;
  cfg.record_stride = opt.stride;
  cfg.validate();

  const auto runs = parallel_map(opt.runs, opt.workers, [&](std::size_t r) {
    SimConfig c = cfg;
    c.seed = rng::derive_seed(opt.seed_base, r);
    const Trajectory traj = simulate(game, c);
    detail::VerifyRun out;
    out.summary = summarize(traj, burn_in);
    out.summary.run_index = r;
    out.summary.seed = c.seed;
    if (params) out.dirichlet = dirichlet_moment_check(traj, *params, burn_in);
    return out;
  });
  for (const auto& r : runs) rep.seeds.push_back(r.summary.seed);

  // Pooled estimates over runs.
  Vector mean = Vector::Zero(ni);
  Matrix pooled = Matrix::Zero(ni, ni);
  for (const auto& r : runs) {
    mean += r.summary.time_average;
    pooled += r.summary.cooccurrence.p;
  }
  mean /= static_cast<double>(runs.size());
  pooled /= static_cast<double>(runs.size());

  // Under positive recurrence the co-occurrence limit is the same on every
  // path, so the runs are pooled. Otherwise the bounds hold path by path and
  // runs settling near different vertices attain equality at different
  // strategies, so each run is checked on its own.
  std::vector<CooccurrenceMatrix> samples;
  if (cls.label == Label::PositiveRecurrent) {
    samples.push_back({pooled, pooled.rowwise().sum()});
  } else {
    for (const auto& r : runs) samples.push_back(r.summary.cooccurrence);
  }
  double worst_low = std::numeric_limits<double>::infinity();
  double worst_min = -std::numeric_limits<double>::infinity();
  double worst_abs = 0.0;
  for (const auto& cm : samples) {
    const Vector resid = hannan_residuals(cls.diagnostics.modified, cm);
    worst_low = std::min(worst_low, resid.minCoeff());
    worst_min = std::max(worst_min, resid.minCoeff());
    worst_abs = std::max(worst_abs, resid.cwiseAbs().maxCoeff());
  }
  rep.checks.push_back({"hannan_lower_bound", worst_low >= -th.hannan, worst_low, -th.hannan,
                        "smallest residual over strategies and runs"});
  rep.checks.push_back({"hannan_equality", worst_min <= th.hannan, worst_min, th.hannan,
                        "largest over runs of the smallest residual"});

  if (cls.label == Label::PositiveRecurrent) {
    rep.checks.push_back({"hannan_all_equal", worst_abs <= th.hannan, worst_abs, th.hannan,
                          "equality for every strategy under positive recurrence"});
    if (cls.certificate.equalizer_point) {
      const double dev = (mean - *cls.certificate.equalizer_point).cwiseAbs().maxCoeff();
      rep.checks.push_back({"time_average", dev <= th.time_average, dev, th.time_average,
                            "sup-norm distance of the pooled time average to the interior equilibrium"});
    }
    if (params) {
      const auto target = dirichlet_moments(*params);
      const Vector var = (pooled.diagonal() - mean.cwiseProduct(mean));
      const double rel = ((var - target.variance).array() / target.variance.array()).abs().maxCoeff();
      rep.checks.push_back({"dirichlet_variance", rel <= th.variance_relative, rel, th.variance_relative,
                            "relative deviation of the pooled variance from the Dirichlet variance"});
      double z = 0.0;
      for (const auto& r : runs) z = std::max(z, r.dirichlet->max_abs_z());
      rep.checks.push_back({"dirichlet_z", z <= th.max_z, z, th.max_z, "largest batch-means z-score over runs"});
    }
  }

  if (cls.label == Label::Transient) {
    std::size_t hits = 0;
    for (const auto& r : runs) hits += r.summary.min_coordinate < th.boundary_level ? 1 : 0;
    const double f = detail::fraction(hits, runs.size());
    rep.checks.push_back({"boundary_approach", f >= th.fraction, f, th.fraction,
                          "share of runs with min_i X_i(T) below the boundary level"});
  }

  for (const std::size_t k : cls.vanishing_strategies) {
    std::size_t hits = 0;
    for (const auto& r : runs)
      hits += r.summary.log_final(static_cast<Eigen::Index>(k)) < std::log(th.boundary_level) ? 1 : 0;
    const double f = detail::fraction(hits, runs.size());
    rep.checks.push_back({"vanishing_strategy_" + std::to_string(k + 1), f >= th.fraction, f, th.fraction,
                          "share of runs with X_k(T) below the boundary level"});
  }

  for (const std::size_t k : cls.stable_vertices) {
    const Vector start = detail::stability_start(n, k, th.stability_start);
    SimConfig sc(SimplexPoint::normalized(start));
    sc.dt = opt.dt;
    sc.t_final = opt.stability_t_final;
    sc.record_stride = 10;
    sc.validate();
    const auto stab = parallel_map(opt.stability_runs, opt.workers, [&](std::size_t r) {
      SimConfig c = sc;
      c.seed = detail::stability_seed(opt.seed_base, k, r);
      const Trajectory traj = simulate(game, c);
      Vector e = Vector::Zero(ni);
      e(static_cast<Eigen::Index>(k)) = 1.0;
      detail::StabilityRun out;
      for (std::size_t i = 0; i < traj.size(); ++i) out.max_distance = std::max(out.max_distance, (traj.state(i) - e).norm());
      out.final_distance = (traj.state(traj.size() - 1) - e).norm();
      return out;
    });
    std::size_t hits = 0;
    for (const auto& s : stab)
      hits += (s.max_distance <= th.stability_radius && s.final_distance < th.stability_target) ? 1 : 0;
    const double f = detail::fraction(hits, stab.size());
    rep.checks.push_back({"stable_vertex_" + std::to_string(k + 1), f >= th.fraction, f, th.fraction,
                          "share of nearby starts that stay close and converge to the vertex"});
  }
  return rep;
}

}  // namespace sreplicator
