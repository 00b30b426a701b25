#pragma once

// JSON ingestion of games and JSON/CSV rendering of every report. Strategy
// indices are 1-based in all serialized output.

#include "sreplicator/analysis.hpp"
#include "sreplicator/classify.hpp"
#include "sreplicator/estimators.hpp"
#include "sreplicator/game.hpp"
#include "sreplicator/simulate.hpp"
#include "sreplicator/verify.hpp"

#include <json.hpp>

#include <cmath>
#include <cstddef>
#include <cstdio>
#include <limits>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace sreplicator::report {

using nlohmann::json;

inline json to_json(const Vector& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

inline json to_json(const Matrix& m) {
  json out = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) out.push_back(to_json(Vector(m.row(i).transpose())));
  return out;
}

inline json one_based(const std::vector<std::size_t>& idx) {
  json out = json::array();
  for (const auto k : idx) out.push_back(k + 1);
  return out;
}

// Non-finite numbers have no JSON representation.
inline json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

inline Game game_from_json(const json& j) {
  if (!j.is_object()) throw InvariantError("game file holds a JSON object");
  if (!j.contains("payoff") || !j["payoff"].is_array() || j["payoff"].empty())
    throw InvariantError("payoff is square with side n");
  const auto& rows = j["payoff"];
  const std::size_t n = rows.size();
  if (n < 2) throw InvariantError("n >= 2 strategies");
  Matrix a(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    if (!rows[i].is_array() || rows[i].size() != n) throw InvariantError("payoff is square with side n");
    for (std::size_t k = 0; k < n; ++k) {
      if (!rows[i][k].is_number()) throw InvariantError("all entries of payoff are finite");
      a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = rows[i][k].get<double>();
    }
  }
  if (!j.contains("sigma") || !j["sigma"].is_array()) throw InvariantError("sigma has length n");
  const auto& sj = j["sigma"];
  if (sj.size() != n) throw InvariantError("sigma has length n");
  Vector s(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    if (!sj[i].is_number()) throw InvariantError("sigma_i > 0 for every i");
    s(static_cast<Eigen::Index>(i)) = sj[i].get<double>();
  }
  Interpretation interp = Interpretation::Ito;
  if (j.contains("interpretation")) {
    const auto& v = j["interpretation"];
    if (v == "ito") {
      interp = Interpretation::Ito;
    } else if (v == "stratonovich") {
      interp = Interpretation::Stratonovich;
    } else {
      throw InvariantError("interpretation is \"ito\" or \"stratonovich\"");
    }
  }
  return Game(std::move(a), std::move(s), interp);
}

inline json game_to_json(const Game& g) {
  return {{"payoff", to_json(g.payoff())}, {"sigma", to_json(g.sigma())}, {"interpretation", to_string(g.interpretation())}};
}

inline json equalizer_json(const EqualizerResult& eq) {
  json j = {{"kind", to_string(eq.kind)}};
  if (eq.kind == EqualizerKind::Empty) return j;
  j["point"] = to_json(eq.point);
  if (eq.kind == EqualizerKind::UniquePoint) {
    j["in_simplex"] = to_string(eq.in_simplex);
  } else {
    json b = json::array();
    for (const auto& d : eq.basis) b.push_back(to_json(d));
    j["basis"] = std::move(b);
  }
  j["simplex_margin"] = number_or_null(eq.simplex_margin);
  j["deepest_point"] = to_json(eq.deepest_point);
  return j;
}

inline json definiteness_json(const DefinitenessLabel& d) {
  return {{"label", to_string(d.label)}, {"eigenvalues", to_json(d.eigenvalues)}};
}

inline json dirichlet_json(const DirichletParams& p) {
  const auto m = dirichlet_moments(p);
  return {{"alpha", to_json(p.alpha())}, {"gamma", p.gamma()}, {"mean", to_json(m.mean)}, {"variance", to_json(m.variance)}};
}

inline json dominated_json(const std::vector<DominatedStrategy>& ds) {
  json out = json::array();
  for (const auto& d : ds) {
    out.push_back({{"strategy", d.strategy + 1}, {"dominator", to_json(d.domination.dominator)}, {"margin", d.domination.margin}});
  }
  return out;
}

inline json separation_json(const Separation& s) {
  return {{"direction", to_json(s.direction)}, {"margin", s.margin}};
}

inline json reciprocal_json(const ReciprocalDensityReport& r) {
  json j = {{"has_reciprocal_density", r.has_reciprocal_density}, {"transient", r.transient}};
  if (r.beta) j["beta"] = to_json(*r.beta);
  if (r.beta_payoff) j["beta_payoff"] = to_json(*r.beta_payoff);
  if (r.second_alpha) j["second_alpha"] = to_json(*r.second_alpha);
  return j;
}

inline json analysis_report(const Game& game, double tol = kDefaultTol) {
  const ModifiedGame mg = modified_game(game);
  json j;
  j["game"] = game_to_json(game);
  j["effective_payoff"] = to_json(effective_payoff(game));
  j["modified_payoff"] = to_json(mg.atilde);
  j["equalizer_set"] = equalizer_json(equalizer_set(mg, tol));
  if (const auto ne = interior_nash(mg, tol)) {
    j["interior_nash"] = {{"point", to_json(ne->point.coords())}, {"unique", ne->unique}};
  } else {
    j["interior_nash"] = nullptr;
  }
  std::vector<std::size_t> pure;
  for (std::size_t k = 0; k < game.n(); ++k)
    if (is_nash(mg, SimplexPoint::vertex(game.n(), k), tol)) pure.push_back(k);
  j["pure_nash"] = one_based(pure);
  j["strict_pure_nash"] = one_based(strict_pure_nash(mg, tol));
  j["definiteness"] = definiteness_json(conditional_definiteness(effective_payoff(game), tol));
  const auto gamma = dirichlet_condition(game, tol);
  j["gamma"] = gamma ? json(*gamma) : json(nullptr);
  const auto dir = dirichlet_invariant(game, tol);
  j["dirichlet"] = dir ? dirichlet_json(*dir) : json(nullptr);
  std::vector<DominatedStrategy> dominated;
  for (std::size_t k = 0; k < game.n(); ++k)
    if (auto d = strictly_dominated(mg, k, tol)) dominated.push_back({k, *d});
  j["dominated_strategies"] = dominated_json(dominated);
  const auto sep = separating_direction(mg, tol);
  j["separating_direction"] = sep ? separation_json(*sep) : json(nullptr);
  j["reciprocal_density"] = reciprocal_json(reciprocal_density_analysis(game, tol));
  return j;
}

inline json rules_json(const std::vector<Rule>& rules) {
  json out = json::array();
  for (const auto r : rules) out.push_back(to_string(r));
  return out;
}

inline json classification_json(const ClassificationReport& rep) {
  const Certificate& c = rep.certificate;
  json w = json::object();
  if (c.gamma) w["gamma"] = *c.gamma;
  if (c.equalizer_point) w["equalizer_point"] = to_json(*c.equalizer_point);
  if (c.separation) w["separating_direction"] = separation_json(*c.separation);
  if (c.definiteness) w["definiteness"] = definiteness_json(*c.definiteness);
  if (c.dirichlet) w["dirichlet"] = dirichlet_json(*c.dirichlet);
  if (c.second_density) w["second_density"] = reciprocal_json(*c.second_density);
  w["strict_pure_nash"] = one_based(c.strict_pure_nash);
  w["dominated_strategies"] = dominated_json(c.dominated);

  json cert = {{"rule", to_string(c.rule)}, {"supporting", rules_json(c.supporting)}, {"witness", std::move(w)}};
  if (!c.clause.empty()) cert["clause"] = c.clause;

  const Diagnostics& d = rep.diagnostics;
  json diag;
  diag["modified_payoff"] = to_json(d.modified.atilde);
  diag["equalizer_set"] = equalizer_json(d.equalizer);
  diag["definiteness"] = definiteness_json(d.definiteness);
  diag["gamma"] = d.gamma ? json(*d.gamma) : json(nullptr);
  diag["interior_nash"] = d.interior_nash
                              ? json{{"point", to_json(d.interior_nash->point.coords())}, {"unique", d.interior_nash->unique}}
                              : json(nullptr);
  diag["reciprocal_density"] = reciprocal_json(d.reciprocal);
  diag["separating_direction"] = d.separation ? separation_json(*d.separation) : json(nullptr);
  diag["constant_columns"] = one_based(d.constant_columns);
  diag["skew_symmetric_modified_payoff"] = d.skew_modified;

  return {{"label", to_string(rep.label)},
          {"certificate", std::move(cert)},
          {"stable_vertices", one_based(rep.stable_vertices)},
          {"vanishing_strategies", one_based(rep.vanishing_strategies)},
          {"diagnostics", std::move(diag)}};
}

inline json dirichlet_check_json(const DirichletCheck& c) {
  return {{"empirical_mean", to_json(c.empirical_mean)},     {"empirical_variance", to_json(c.empirical_variance)},
          {"target_mean", to_json(c.target_mean)},           {"target_variance", to_json(c.target_variance)},
          {"z_mean", to_json(c.z_mean)},                     {"z_variance", to_json(c.z_variance)},
          {"samples", c.samples},                            {"max_abs_z", c.max_abs_z()}};
}

/// Estimator summary of a single trajectory. The Dirichlet check is included
/// when params are supplied.
inline json estimator_report(const Game& game, const Trajectory& traj, double burn_in,
                             const std::optional<DirichletParams>& params = std::nullopt, std::size_t thin = 1) {
  const ModifiedGame mg = modified_game(game);
  const auto cm = cooccurrence(traj, burn_in);
  const auto bd = boundary_diagnostics(traj);
  json j;
  j["burn_in"] = burn_in;
  j["time_average"] = to_json(time_average(traj, burn_in).coords());
  j["cooccurrence"] = to_json(cm.p);
  j["hannan_residuals"] = to_json(hannan_residuals(mg, cm));
  j["boundary"] = {{"min_final", bd.min_final},
                   {"min_log_final", bd.min_log_final},
                   {"log_final", to_json(bd.log_final)},
                   {"log_slope", to_json(bd.log_slope)}};
  if (params) j["dirichlet_check"] = dirichlet_check_json(dirichlet_moment_check(traj, *params, burn_in, thin));
  return j;
}

inline json verify_json(const VerifyReport& rep) {
  json checks = json::array();
  for (const auto& c : rep.checks) {
    checks.push_back({{"name", c.name}, {"passed", c.passed}, {"value", number_or_null(c.value)},
                      {"threshold", c.threshold}, {"detail", c.detail}});
  }
  return {{"passed", rep.passed()},
          {"label", to_string(rep.classification.label)},
          {"rule", to_string(rep.classification.certificate.rule)},
          {"seeds", rep.seeds},
          {"checks", std::move(checks)}};
}

/// Header `t,x1,...,xn`, one row per record, 17 significant digits.
inline void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
  os << 't';
  for (std::size_t i = 1; i <= traj.n(); ++i) os << ",x" << i;
  os << '\n';
  char buf[32];
  std::string line;
  for (std::size_t k = 0; k < traj.size(); ++k) {
    line.clear();
    std::snprintf(buf, sizeof buf, "%.17g", traj.time(k));
    line += buf;
    const auto x = traj.state(k);
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      std::snprintf(buf, sizeof buf, ",%.17g", x(i));
      line += buf;
    }
    line += '\n';
    os << line;
  }
}

}  // namespace sreplicator::report
