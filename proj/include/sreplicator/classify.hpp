#pragma once

// Long-run classification of the stochastic replicator process. Each label
// comes with the rule that produced it and a witness that can be checked
// independently (separating direction, definiteness eigenvalues, Dirichlet
// parameter, second invariant density, ...).

#include "sreplicator/analysis.hpp"
#include "sreplicator/game.hpp"

#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace sreplicator {

enum class Label { PositiveRecurrent, NullRecurrent, ConjecturedNullRecurrent, Transient, NotPositiveRecurrent, Unknown };

inline const char* to_string(Label l) {
  switch (l) {
    case Label::PositiveRecurrent: return "PositiveRecurrent";
    case Label::NullRecurrent: return "NullRecurrent";
    case Label::ConjecturedNullRecurrent: return "ConjecturedNullRecurrent";
    case Label::Transient: return "Transient";
    case Label::NotPositiveRecurrent: return "NotPositiveRecurrent";
    case Label::Unknown: return "Unknown";
  }
  return "?";
}

enum class Rule {
  None,
  ExclusionPrinciple,             // no equalizer in Δ; separating direction
  SecondInvariantDensity,         // reciprocal density plus a second one
  PositiveDefiniteEqualizer,      // cond. positive definite, non-vertex equalizer
  PositiveDefiniteLowDimension,   // cond. positive definite, n <= 3
  DirichletTransience,            // Dirichlet condition with γ < 0 or no equalizer in Δ
  DirichletInvariantLaw,          // Dirichlet condition, γ > 0, interior equilibrium
  DirichletNotPositiveRecurrent,  // Dirichlet condition, γ <= 0 or no interior equilibrium
  LineOfEquilibria,               // interior equalizers are not unique
  ZeroSumModifiedGame,            // Ã skew-symmetric
  TwoStrategyCoexistence,
  TwoStrategyBistable,
  TwoStrategyDominance,
  TwoStrategyBoundaryTie,
  BalancedRockScissorsPaper,
  ConstantColumn,                 // a column of Ã proportional to 1
};

inline const char* to_string(Rule r) {
  switch (r) {
    case Rule::None: return "none";
    case Rule::ExclusionPrinciple: return "exclusion_principle";
    case Rule::SecondInvariantDensity: return "second_invariant_density";
    case Rule::PositiveDefiniteEqualizer: return "positive_definite_equalizer";
    case Rule::PositiveDefiniteLowDimension: return "positive_definite_low_dimension";
    case Rule::DirichletTransience: return "dirichlet_transience";
    case Rule::DirichletInvariantLaw: return "dirichlet_invariant_law";
    case Rule::DirichletNotPositiveRecurrent: return "dirichlet_not_positive_recurrent";
    case Rule::LineOfEquilibria: return "line_of_equilibria";
    case Rule::ZeroSumModifiedGame: return "zero_sum_modified_game";
    case Rule::TwoStrategyCoexistence: return "two_strategy_coexistence";
    case Rule::TwoStrategyBistable: return "two_strategy_bistable";
    case Rule::TwoStrategyDominance: return "two_strategy_dominance";
    case Rule::TwoStrategyBoundaryTie: return "two_strategy_boundary_tie";
    case Rule::BalancedRockScissorsPaper: return "balanced_rock_scissors_paper";
    case Rule::ConstantColumn: return "constant_column";
  }
  return "?";
}

struct DominatedStrategy {
  std::size_t strategy;
  Domination domination;
};

struct Certificate {
  Rule rule = Rule::None;
  std::vector<Rule> supporting;
  std::string clause;

  std::optional<double> gamma;
  std::optional<Vector> equalizer_point;
  std::optional<Separation> separation;
  std::optional<DefinitenessLabel> definiteness;
  std::optional<DirichletParams> dirichlet;
  std::optional<ReciprocalDensityReport> second_density;
  std::vector<std::size_t> strict_pure_nash;
  std::vector<DominatedStrategy> dominated;
};

/// Everything computed on the way to a label.
struct Diagnostics {
  ModifiedGame modified;
  EqualizerResult equalizer;
  DefinitenessLabel definiteness;
  std::optional<double> gamma;
  std::optional<InteriorNash> interior_nash;
  ReciprocalDensityReport reciprocal;
  std::optional<Separation> separation;
  std::vector<std::size_t> strict_pure_nash;
  std::vector<DominatedStrategy> dominated;
  std::vector<std::size_t> constant_columns;
  bool skew_modified = false;
};

struct ClassificationReport {
  Label label = Label::Unknown;
  Certificate certificate;
  std::vector<std::size_t> stable_vertices;       // 0-based
  std::vector<std::size_t> vanishing_strategies;  // 0-based
  Diagnostics diagnostics;
};

inline Diagnostics diagnose(const Game& game, double tol = kDefaultTol) {
  Diagnostics d;
  d.modified = modified_game(game);
  d.equalizer = equalizer_set(d.modified, tol);
  d.definiteness = conditional_definiteness(effective_payoff(game), tol);
  d.gamma = dirichlet_condition(game, tol);
  d.interior_nash = interior_nash(d.modified, tol);
  d.reciprocal = reciprocal_density_analysis(game, tol);
  d.separation = separating_direction(d.modified, tol);
  d.strict_pure_nash = strict_pure_nash(d.modified, tol);
  for (std::size_t k = 0; k < game.n(); ++k) {
    if (auto dom = strictly_dominated(d.modified, k, tol)) d.dominated.push_back({k, *dom});
  }
  d.constant_columns = constant_columns(d.modified, tol);
  d.skew_modified = is_skew_symmetric(d.modified.atilde, tol);
  return d;
}

namespace detail {

inline bool near_vertex(const Vector& p, double tol) {
  for (Eigen::Index k = 0; k < p.size(); ++k) {
    Vector e = Vector::Zero(p.size());
    e(k) = 1.0;
    if ((p - e).cwiseAbs().maxCoeff() <= tol) return true;
  }
  return false;
}

// Some solution of the equalizer system that is not a vertex, if any.
inline std::optional<Vector> non_vertex_equalizer(const EqualizerResult& eq, double tol) {
  if (eq.kind == EqualizerKind::Empty) return std::nullopt;
  if (!near_vertex(eq.deepest_point, tol)) return eq.deepest_point;
  if (eq.kind == EqualizerKind::AffineSubspace) {
    for (const auto& d : eq.basis) {
      const Vector p = eq.deepest_point + 0.5 * d;
      if (!near_vertex(p, tol)) return p;
    }
  }
  return std::nullopt;
}

// Same cyclic three-strategy pattern with equal win and loss payoffs (after
// removing column constants) and equal noise on every strategy.
inline bool balanced_rock_scissors_paper(const Game& game, double tol) {
  if (game.n() != 3) return false;
  const Vector& s = game.sigma();
  if (std::abs(s(0) - s(1)) > tol * s(0) || std::abs(s(0) - s(2)) > tol * s(0)) return false;
  Matrix a = effective_payoff(game);
  for (Eigen::Index j = 0; j < 3; ++j) a.col(j).array() -= a(j, j);
  a /= payoff_scale(a);
  const double u = a(0, 1), v = a(0, 2);
  const bool cyclic = std::abs(a(1, 2) - u) <= tol && std::abs(a(2, 0) - u) <= tol && std::abs(a(1, 0) - v) <= tol &&
                      std::abs(a(2, 1) - v) <= tol;
  return cyclic && std::abs(u + v) <= tol && std::abs(u) > tol;
}

}  // namespace detail

/// Applies the rule battery in precedence order. Transient and positive
/// recurrent labels are final; a NotPositiveRecurrent finding is kept while
/// the more specific two-strategy and rock-scissors-paper rules get a chance
/// to refine it.
inline ClassificationReport classify(const Game& game, double tol = kDefaultTol) {
  ClassificationReport rep;
  rep.diagnostics = diagnose(game, tol);
  const Diagnostics& d = rep.diagnostics;
  const std::size_t n = game.n();
  rep.stable_vertices = d.strict_pure_nash;
  for (const auto& ds : d.dominated) rep.vanishing_strategies.push_back(ds.strategy);

  auto base = [&](Rule rule) {
    Certificate c;
    c.rule = rule;
    c.strict_pure_nash = d.strict_pure_nash;
    c.dominated = d.dominated;
    c.gamma = d.gamma;
    return c;
  };
  auto finish = [&](Label label, Certificate c) {
    rep.label = label;
    rep.certificate = std::move(c);
    return rep;
  };

  const bool pos_def = d.definiteness.label == Definiteness::CondPositiveDefinite;

  // Second invariant density.
  if (d.reciprocal.transient) {
    Certificate c = base(Rule::SecondInvariantDensity);
    c.second_density = d.reciprocal;
    if (d.separation) c.supporting.push_back(Rule::ExclusionPrinciple);
    return finish(Label::Transient, std::move(c));
  }

  // Exclusion principle.
  if (!d.equalizer.meets_simplex(tol) && d.separation) {
    Certificate c = base(Rule::ExclusionPrinciple);
    c.separation = d.separation;
    if (d.gamma) c.supporting.push_back(Rule::DirichletTransience);
    return finish(Label::Transient, std::move(c));
  }

  // Conditional positive definiteness.
  if (pos_def) {
    if (auto p = detail::non_vertex_equalizer(d.equalizer, tol)) {
      Certificate c = base(Rule::PositiveDefiniteEqualizer);
      c.definiteness = d.definiteness;
      c.equalizer_point = *p;
      if (n <= 3) c.supporting.push_back(Rule::PositiveDefiniteLowDimension);
      if (n == 2) c.supporting.push_back(Rule::TwoStrategyBistable);
      return finish(Label::Transient, std::move(c));
    }
    if (n <= 3) {
      Certificate c = base(Rule::PositiveDefiniteLowDimension);
      c.definiteness = d.definiteness;
      return finish(Label::Transient, std::move(c));
    }
  }

  std::optional<Certificate> weak;
  auto note_weak = [&](Rule rule) {
    if (weak) {
      weak->supporting.push_back(rule);
    } else {
      weak = base(rule);
    }
  };

  // Dirichlet family.
  if (d.gamma) {
    const double g = *d.gamma;
    if (d.interior_nash && d.interior_nash->unique && g > tol) {
      Certificate c = base(Rule::DirichletInvariantLaw);
      c.equalizer_point = d.interior_nash->point.coords();
      c.dirichlet = DirichletParams(g * d.interior_nash->point.coords());
      if (n == 2) c.supporting.push_back(Rule::TwoStrategyCoexistence);
      return finish(Label::PositiveRecurrent, std::move(c));
    }
    const bool negative = g < -tol;
    std::string clause;
    if (negative && n <= 3) {
      clause = "negative_gamma_low_dimension";
    } else if (negative && d.equalizer.meets_simplex(tol) && detail::non_vertex_equalizer(d.equalizer, tol) &&
               !detail::near_vertex(d.equalizer.deepest_point, tol)) {
      clause = "negative_gamma_equalizer";
    } else if (!d.equalizer.meets_simplex(tol)) {
      clause = "no_equalizer_in_simplex";
    }
    if (!clause.empty()) {
      Certificate c = base(Rule::DirichletTransience);
      c.clause = clause;
      c.definiteness = d.definiteness;
      if (d.equalizer.kind != EqualizerKind::Empty) c.equalizer_point = d.equalizer.deepest_point;
      if (d.separation) c.separation = d.separation;
      return finish(Label::Transient, std::move(c));
    }
    note_weak(Rule::DirichletNotPositiveRecurrent);
    if (d.interior_nash) weak->equalizer_point = d.interior_nash->point.coords();
  }

  if (d.interior_nash && !d.interior_nash->unique) {
    note_weak(Rule::LineOfEquilibria);
    if (!weak->equalizer_point) weak->equalizer_point = d.interior_nash->point.coords();
  }

  if (d.skew_modified) note_weak(Rule::ZeroSumModifiedGame);

  // Complete two-strategy table.
  if (n == 2) {
    const Matrix s = d.modified.atilde / detail::payoff_scale(d.modified.atilde);
    const double d1 = s(0, 0) - s(1, 0);
    const double d2 = s(1, 1) - s(0, 1);
    auto pos = [tol](double v) { return v > tol; };
    auto neg = [tol](double v) { return v < -tol; };
    auto tie = [tol](double v) { return std::abs(v) <= tol; };
    if (neg(d1) && neg(d2) && d.interior_nash) {
      Certificate c = base(Rule::TwoStrategyCoexistence);
      c.equalizer_point = d.interior_nash->point.coords();
      if (d.gamma && *d.gamma > tol) c.dirichlet = DirichletParams(*d.gamma * d.interior_nash->point.coords());
      return finish(Label::PositiveRecurrent, std::move(c));
    }
    if (pos(d1) && pos(d2)) {
      Certificate c = base(Rule::TwoStrategyBistable);
      c.definiteness = d.definiteness;
      return finish(Label::Transient, std::move(c));
    }
    if ((pos(d1) && neg(d2)) || (neg(d1) && pos(d2))) {
      Certificate c = base(Rule::TwoStrategyDominance);
      Vector dir(2);
      dir << (pos(d1) ? 1.0 : -1.0), (pos(d1) ? -1.0 : 1.0);
      c.separation = Separation{dir, (dir.transpose() * d.modified.atilde).minCoeff()};
      return finish(Label::Transient, std::move(c));
    }
    if ((tie(d1) && neg(d2)) || (tie(d2) && neg(d1))) {
      Certificate c = base(Rule::TwoStrategyBoundaryTie);
      if (d.equalizer.kind != EqualizerKind::Empty) c.equalizer_point = d.equalizer.deepest_point;
      if (weak) {
        c.supporting.push_back(weak->rule);
        c.supporting.insert(c.supporting.end(), weak->supporting.begin(), weak->supporting.end());
      }
      return finish(Label::NullRecurrent, std::move(c));
    }
  }

  if (detail::balanced_rock_scissors_paper(game, tol)) {
    Certificate c = base(Rule::BalancedRockScissorsPaper);
    if (d.interior_nash) c.equalizer_point = d.interior_nash->point.coords();
    if (weak) {
      c.supporting.push_back(weak->rule);
      c.supporting.insert(c.supporting.end(), weak->supporting.begin(), weak->supporting.end());
    }
    return finish(Label::ConjecturedNullRecurrent, std::move(c));
  }

  if (!d.constant_columns.empty()) note_weak(Rule::ConstantColumn);

  if (weak) return finish(Label::NotPositiveRecurrent, std::move(*weak));
  return finish(Label::Unknown, base(Rule::None));
}

enum class VertexStability { StrictNashStable, NotNashUnstable, BoundaryCase };

inline const char* to_string(VertexStability v) {
  switch (v) {
    case VertexStability::StrictNashStable: return "strict_nash_stable";
    case VertexStability::NotNashUnstable: return "not_nash_unstable";
    case VertexStability::BoundaryCase: return "boundary_case";
  }
  return "?";
}

struct VertexStabilityReport {
  VertexStability kind = VertexStability::BoundaryCase;
  std::vector<std::string> notes;
};

inline VertexStabilityReport stability_of_vertex(const Game& game, std::size_t k, double tol = kDefaultTol) {
  if (k >= game.n()) throw std::out_of_range("stability_of_vertex: strategy index out of range");
  const ModifiedGame mg = modified_game(game);
  const Matrix s = mg.atilde / detail::payoff_scale(mg.atilde);
  const auto kk = static_cast<Eigen::Index>(k);
  const Eigen::Index n = s.rows();

  bool strict = true;
  bool beaten = false;
  std::vector<Eigen::Index> ties;
  for (Eigen::Index j = 0; j < n; ++j) {
    if (j == kk) continue;
    if (!(s(kk, kk) > s(j, kk) + tol)) strict = false;
    if (s(kk, kk) < s(j, kk) - tol) beaten = true;
    if (std::abs(s(kk, kk) - s(j, kk)) <= tol) ties.push_back(j);
  }
  VertexStabilityReport rep;
  if (strict) {
    rep.kind = VertexStability::StrictNashStable;
    return rep;
  }
  if (beaten) {
    rep.kind = VertexStability::NotNashUnstable;
    rep.notes.emplace_back("not a Nash equilibrium of the modified game: convergence to this vertex has probability 0");
    return rep;
  }
  rep.kind = VertexStability::BoundaryCase;
  if (n == 2) {
    rep.notes.emplace_back("two strategies: stability is equivalent to strictness, so this vertex is not stable");
  }
  for (const Eigen::Index i : ties) {
    bool escape = false;
    for (Eigen::Index j = 0; j < n && !escape; ++j)
      if (j != kk && s(i, j) < s(kk, j) - tol) escape = true;
    if (!escape) {
      rep.notes.emplace_back("strategy " + std::to_string(i + 1) +
                             " weakly dominates this vertex: positive-probability convergence impossible");
    }
  }
  return rep;
}

}  // namespace sreplicator
