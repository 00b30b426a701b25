#include "catch_amalgamated.hpp"
#include "support.hpp"

#include <algorithm>
#include <set>

using namespace sreplicator;
using namespace fixtures;

namespace {

std::vector<std::size_t> idx(std::initializer_list<std::size_t> v) { return v; }

bool has_rule(const Certificate& c, Rule r) {
  return c.rule == r || std::find(c.supporting.begin(), c.supporting.end(), r) != c.supporting.end();
}

// Every decisive certificate carries a witness that can be re-checked from Ã.
void check_certificate(const Game& g, const ClassificationReport& rep) {
  const ModifiedGame mg = modified_game(g);
  const double scale = std::max(1.0, mg.atilde.cwiseAbs().maxCoeff());
  const Certificate& c = rep.certificate;
  if (c.separation) {
    const Vector& d = c.separation->direction;
    CHECK(std::abs(d.sum()) <= 1e-9);
    CHECK((d.transpose() * mg.atilde).minCoeff() > 0.0);
  }
  if (c.definiteness && c.definiteness->label == Definiteness::CondPositiveDefinite)
    CHECK(c.definiteness->eigenvalues.minCoeff() > 0.0);
  if (c.second_density) {
    REQUIRE(c.second_density->beta);
    const Vector bp = mg.atilde.transpose() * *c.second_density->beta;
    CHECK((bp.array() - bp(0)).abs().maxCoeff() <= 1e-9 * scale);
    CHECK(std::abs(bp(0)) > 1e-9 * scale);
  }
  if (c.dirichlet) {
    const Vector& a = c.dirichlet->alpha();
    CHECK(a.minCoeff() > 0.0);
    // the density's mean is the interior equilibrium
    REQUIRE(c.equalizer_point);
    CHECK((a / a.sum() - *c.equalizer_point).cwiseAbs().maxCoeff() <= 1e-9);
  }
  for (const auto& ds : c.dominated) {
    const Vector payoff = mg.atilde.transpose() * ds.domination.dominator;
    const Vector own = mg.atilde.row(static_cast<Eigen::Index>(ds.strategy)).transpose();
    CHECK(((payoff - own).array() > 0.0).all());
  }
}

}  // namespace

TEST_CASE("regression labels for the canonical games") {
  struct Case {
    const char* name;
    Game game;
    Label label;
    Rule rule;
  };
  const std::vector<Case> cases = {
      {"matching", matching(), Label::PositiveRecurrent, Rule::DirichletInvariantLaw},
      {"matching stratonovich", matching(1.0, Interpretation::Stratonovich), Label::PositiveRecurrent,
       Rule::DirichletInvariantLaw},
      {"rsp recurrent", rsp(1, 2), Label::PositiveRecurrent, Rule::DirichletInvariantLaw},
      {"rsp transient", rsp(2, 1), Label::Transient, Rule::PositiveDefiniteEqualizer},
      {"rsp balanced", rsp(1, 1), Label::ConjecturedNullRecurrent, Rule::BalancedRockScissorsPaper},
      {"boundary tie", boundary_tie(), Label::NullRecurrent, Rule::TwoStrategyBoundaryTie},
      {"bistable", bistable(), Label::Transient, Rule::PositiveDefiniteEqualizer},
      {"dominance", dominance(), Label::Transient, Rule::SecondInvariantDensity},
      {"skew second density", skew_second_density(), Label::Transient, Rule::SecondInvariantDensity},
      {"dominated by mix", dominated_by_mix(), Label::Transient, Rule::ExclusionPrinciple},
      {"constant column", constant_column(), Label::NotPositiveRecurrent, Rule::ConstantColumn},
      {"zero game", Game(Matrix::Zero(3, 3), constant(3, 1.0)), Label::NotPositiveRecurrent,
       Rule::DirichletNotPositiveRecurrent},
  };
  for (const auto& c : cases) {
    INFO(c.name);
    const auto rep = classify(c.game);
    CHECK(rep.label == c.label);
    CHECK(rep.certificate.rule == c.rule);
    check_certificate(c.game, rep);
  }
}

TEST_CASE("certificate details of the canonical games") {
  const auto m = classify(matching());
  REQUIRE(m.certificate.dirichlet);
  CHECK((m.certificate.dirichlet->alpha().array() - 1.0).abs().maxCoeff() <= 1e-12);
  CHECK(has_rule(m.certificate, Rule::TwoStrategyCoexistence));

  const auto r = classify(rsp(1, 2));
  REQUIRE(r.certificate.dirichlet);
  CHECK((r.certificate.dirichlet->alpha().array() - 4.0 / 3).abs().maxCoeff() <= 1e-12);

  const auto t = classify(rsp(2, 1));
  REQUIRE(t.certificate.definiteness);
  CHECK((t.certificate.definiteness->eigenvalues.array() - 0.5).abs().maxCoeff() <= 1e-12);
  CHECK(has_rule(t.certificate, Rule::PositiveDefiniteLowDimension));

  const auto b = classify(bistable());
  CHECK(b.stable_vertices == idx({0, 1}));
  CHECK(has_rule(b.certificate, Rule::TwoStrategyBistable));

  const auto d = classify(dominance());
  CHECK(has_rule(d.certificate, Rule::ExclusionPrinciple));
  CHECK(d.stable_vertices == idx({0}));

  const auto x = classify(dominated_by_mix());
  CHECK(x.vanishing_strategies == idx({2}));
  REQUIRE(x.certificate.dominated.size() == 1);
  CHECK(x.certificate.dominated[0].domination.dominator.isApprox(vec({0.5, 0.5, 0.0}), 1e-9));
}

TEST_CASE("vertex stability") {
  CHECK(stability_of_vertex(bistable(), 0).kind == VertexStability::StrictNashStable);
  CHECK(stability_of_vertex(bistable(), 1).kind == VertexStability::StrictNashStable);
  CHECK(stability_of_vertex(dominance(), 0).kind == VertexStability::StrictNashStable);
  CHECK(stability_of_vertex(dominance(), 1).kind == VertexStability::NotNashUnstable);
  CHECK(stability_of_vertex(matching(), 0).kind == VertexStability::NotNashUnstable);

  const auto tie = stability_of_vertex(boundary_tie(), 0);
  CHECK(tie.kind == VertexStability::BoundaryCase);
  REQUIRE_FALSE(tie.notes.empty());
  CHECK_THAT(tie.notes.front(), Catch::Matchers::ContainsSubstring("not stable"));

  // e1 of the constant-column game ties with e2 and e3, but both can be escaped
  const auto cc = stability_of_vertex(constant_column(), 0);
  CHECK(cc.kind == VertexStability::BoundaryCase);
  CHECK(cc.notes.empty());

  // here e2 ties with e1 in the first column and does at least as well everywhere
  const auto wd = stability_of_vertex(from_modified(mat({{0, 0, 0}, {0, 1, 0}, {-1, 0, 1}}), 0.5), 0);
  CHECK(wd.kind == VertexStability::BoundaryCase);
  REQUIRE(wd.notes.size() == 1);
  CHECK_THAT(wd.notes[0], Catch::Matchers::ContainsSubstring("positive-probability convergence impossible"));

  CHECK_THROWS_AS(stability_of_vertex(matching(), 2), std::out_of_range);
}

TEST_CASE("classification is invariant under column shifts and relabeling") {
  Random rng(71);
  for (int t = 0; t < 150; ++t) {
    const Eigen::Index n = rng.integer(2, 4);
    const Game g = rng.game(n);
    const auto base = classify(g);

    const Game s = shift_column(g, static_cast<std::size_t>(rng.integer(0, static_cast<int>(n) - 1)),
                                rng.uniform(-2, 2));
    const auto shifted = classify(s);
    CHECK(shifted.label == base.label);
    CHECK(shifted.stable_vertices == base.stable_vertices);
    CHECK(shifted.vanishing_strategies == base.vanishing_strategies);

    const auto perm = rng.permutation(static_cast<std::size_t>(n));
    const auto relabeled = classify(permute(g, perm));
    CHECK(relabeled.label == base.label);
    std::set<std::size_t> mapped;
    for (const std::size_t i : relabeled.stable_vertices) mapped.insert(perm[i]);
    CHECK(mapped == std::set<std::size_t>(base.stable_vertices.begin(), base.stable_vertices.end()));
  }
}

TEST_CASE("random games get sound certificates") {
  Random rng(72);
  std::map<Label, int> seen;
  for (int t = 0; t < 300; ++t) {
    const Eigen::Index n = rng.integer(2, 5);
    const Game g = rng.game(n, t % 3 == 0 ? Interpretation::Stratonovich : Interpretation::Ito);
    const auto rep = classify(g);
    ++seen[rep.label];
    check_certificate(g, rep);
    const auto& d = rep.diagnostics;
    if (rep.label == Label::PositiveRecurrent) {
      CHECK(d.constant_columns.empty());
      CHECK_FALSE(d.skew_modified);
      CHECK(rep.vanishing_strategies.empty());
      CHECK(rep.stable_vertices.empty());
    }
    // stable vertices are exactly the strict pure equilibria
    for (const std::size_t k : rep.stable_vertices)
      CHECK(stability_of_vertex(g, k).kind == VertexStability::StrictNashStable);
    for (std::size_t k = 0; k < g.n(); ++k) {
      if (stability_of_vertex(g, k).kind == VertexStability::StrictNashStable)
        CHECK(std::find(rep.stable_vertices.begin(), rep.stable_vertices.end(), k) != rep.stable_vertices.end());
    }
    // a dominated strategy is never a strict equilibrium
    for (const std::size_t k : rep.vanishing_strategies)
      CHECK(std::find(rep.stable_vertices.begin(), rep.stable_vertices.end(), k) == rep.stable_vertices.end());
  }
  CHECK(seen[Label::Transient] > 0);
}

TEST_CASE("two-strategy games fall in exactly one branch") {
  Random rng(73);
  for (int t = 0; t < 400; ++t) {
    // integer entries make ties common
    Matrix at(2, 2);
    for (Eigen::Index i = 0; i < 2; ++i)
      for (Eigen::Index j = 0; j < 2; ++j) at(i, j) = rng.integer(-2, 2);
    const Game g = from_modified(at, rng.uniform(0.2, 1.5));
    const double d1 = at(0, 0) - at(1, 0), d2 = at(1, 1) - at(0, 1);
    const auto rep = classify(g);
    INFO("d1=" << d1 << " d2=" << d2);
    if (d1 < 0 && d2 < 0) {
      CHECK(rep.label == Label::PositiveRecurrent);
      REQUIRE(rep.certificate.equalizer_point);
      const double p = d2 / (d1 + d2);
      CHECK((*rep.certificate.equalizer_point)(0) == Catch::Approx(p).margin(1e-9));
    } else if (d1 > 0 && d2 > 0) {
      CHECK(rep.label == Label::Transient);
      CHECK(rep.stable_vertices == idx({0, 1}));
    } else if ((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) {
      CHECK(rep.label == Label::Transient);
      CHECK(rep.stable_vertices == (d1 > 0 ? idx({0}) : idx({1})));
      CHECK(rep.vanishing_strategies == (d1 > 0 ? idx({1}) : idx({0})));
    } else if ((d1 == 0 && d2 < 0) || (d2 == 0 && d1 < 0)) {
      CHECK(rep.label == Label::NullRecurrent);
      CHECK(rep.stable_vertices.empty());
    } else {
      CHECK(rep.label != Label::PositiveRecurrent);
    }
  }
}

TEST_CASE("Stratonovich games: strict equilibria read off the raw payoff") {
  Random rng(74);
  for (int t = 0; t < 50; ++t) {
    const Eigen::Index n = rng.integer(2, 5);
    const Game g = rng.game(n, Interpretation::Stratonovich);
    const Matrix& a = g.payoff();
    std::vector<std::size_t> expected;
    for (Eigen::Index k = 0; k < n; ++k) {
      bool strict = true;
      for (Eigen::Index j = 0; j < n; ++j)
        if (j != k && !(a(k, k) > a(j, k))) strict = false;
      if (strict) expected.push_back(static_cast<std::size_t>(k));
    }
    CHECK(classify(g).stable_vertices == expected);
    CHECK(strict_pure_nash(modified_game(g)) == expected);
  }
}
