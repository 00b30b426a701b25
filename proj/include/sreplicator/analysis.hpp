#pragma once

// Static analysis of a game: equalizer sets, Nash checks, conditional
// definiteness, Dirichlet invariant laws and the linear-programming
// certificates for domination and separation.
//
// Comparisons against the payoff matrix are made on a copy scaled so that
// max|ã_ij| lies in [1, 10); tolerances refer to that scale.

#include "sreplicator/game.hpp"
#include "sreplicator/lp.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

namespace sreplicator {

inline constexpr double kDefaultTol = 1e-9;

namespace detail {

/// Power of ten that brings max|m_ij| into [1, 10).
inline double payoff_scale(const Matrix& m) {
  const double mx = m.size() > 0 ? m.cwiseAbs().maxCoeff() : 0.0;
  if (!(mx > 0.0) || !std::isfinite(mx)) return 1.0;
  return std::pow(10.0, std::floor(std::log10(mx)));
}

// Rows (Ãy)_i - (Ãy)_n for i < n, then the row of ones.
inline Matrix equalizer_system(const Matrix& at) {
  const Eigen::Index n = at.rows();
  Matrix m(n, n);
  for (Eigen::Index i = 0; i + 1 < n; ++i) m.row(i) = at.row(i) - at.row(n - 1);
  m.row(n - 1).setOnes();
  return m;
}

inline Matrix orthonormal_columns(const std::vector<Vector>& vs, Eigen::Index n) {
  if (vs.empty()) return Matrix(n, 0);
  Matrix b(n, static_cast<Eigen::Index>(vs.size()));
  for (std::size_t k = 0; k < vs.size(); ++k) b.col(static_cast<Eigen::Index>(k)) = vs[k];
  Eigen::HouseholderQR<Matrix> qr(b);
  return qr.householderQ() * Matrix::Identity(n, b.cols());
}

}  // namespace detail

enum class EqualizerKind { Empty, UniquePoint, AffineSubspace };
enum class SimplexLocation { Interior, Boundary, Outside };

inline const char* to_string(EqualizerKind k) {
  switch (k) {
    case EqualizerKind::Empty: return "empty";
    case EqualizerKind::UniquePoint: return "unique_point";
    case EqualizerKind::AffineSubspace: return "affine_subspace";
  }
  return "?";
}

inline const char* to_string(SimplexLocation l) {
  switch (l) {
    case SimplexLocation::Interior: return "interior";
    case SimplexLocation::Boundary: return "boundary";
    case SimplexLocation::Outside: return "outside";
  }
  return "?";
}

/// Solution set of {y : (Ãy)_1 = ... = (Ãy)_n, Σy_i = 1}.
struct EqualizerResult {
  EqualizerKind kind = EqualizerKind::Empty;
  /// The unique solution, or a particular solution of an affine family.
  Vector point;
  /// Directions spanning an affine family (each sums to zero).
  std::vector<Vector> basis;
  SimplexLocation in_simplex = SimplexLocation::Outside;
  /// max over the solution set of min_i y_i; -inf when empty. Positive iff
  /// the set meets int Δ, nonnegative iff it meets Δ.
  double simplex_margin = -std::numeric_limits<double>::infinity();
  /// A solution attaining simplex_margin (absent when empty).
  Vector deepest_point;

  bool meets_simplex(double tol = kDefaultTol) const { return simplex_margin >= -tol; }
  bool meets_interior(double tol = kDefaultTol) const { return simplex_margin > tol; }
};

inline EqualizerResult equalizer_set(const ModifiedGame& mg, double tol = kDefaultTol) {
  const Eigen::Index n = mg.atilde.rows();
  const Matrix at = mg.atilde / detail::payoff_scale(mg.atilde);
  const Matrix m = detail::equalizer_system(at);
  Vector rhs = Vector::Zero(n);
  rhs(n - 1) = 1.0;

  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Vector& sv = svd.singularValues();
  const double cutoff = 1e-9 * sv(0);
  Eigen::Index rank = 0;
  while (rank < n && sv(rank) > cutoff) ++rank;

  Vector y0 = Vector::Zero(n);
  for (Eigen::Index k = 0; k < rank; ++k)
    y0 += (svd.matrixU().col(k).dot(rhs) / sv(k)) * svd.matrixV().col(k);

  EqualizerResult res;
  if ((m * y0 - rhs).norm() > tol * std::max(1.0, sv(0))) return res;

  res.point = y0;
  if (rank == n) {
    res.kind = EqualizerKind::UniquePoint;
    const double lo = y0.minCoeff();
    res.in_simplex = lo > tol ? SimplexLocation::Interior
                   : lo >= -tol ? SimplexLocation::Boundary
                                : SimplexLocation::Outside;
    res.simplex_margin = lo;
    res.deepest_point = y0;
    return res;
  }

  res.kind = EqualizerKind::AffineSubspace;
  for (Eigen::Index k = rank; k < n; ++k) res.basis.emplace_back(svd.matrixV().col(k));

  // max s  s.t.  s <= (y0 + N t)_i,  s <= 1, with t and s free.
  const auto dim = static_cast<Eigen::Index>(res.basis.size());
  lp::Problem prob(dim + 1);
  std::fill(prob.free_vars.begin(), prob.free_vars.end(), true);
  prob.objective(dim) = 1.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    Eigen::RowVectorXd row = Eigen::RowVectorXd::Zero(dim + 1);
    for (Eigen::Index k = 0; k < dim; ++k) row(k) = -res.basis[static_cast<std::size_t>(k)](i);
    row(dim) = 1.0;
    prob.add_le(row, y0(i));
  }
  Eigen::RowVectorXd cap = Eigen::RowVectorXd::Zero(dim + 1);
  cap(dim) = 1.0;
  prob.add_le(cap, 1.0);
  const auto sol = lp::maximize(prob);
  Vector deepest = y0;
  if (sol.status == lp::Status::Optimal) {
    for (Eigen::Index k = 0; k < dim; ++k) deepest += sol.x(k) * res.basis[static_cast<std::size_t>(k)];
  }
  res.deepest_point = deepest;
  res.simplex_margin = deepest.minCoeff();
  res.in_simplex = res.simplex_margin > tol ? SimplexLocation::Interior
                 : res.simplex_margin >= -tol ? SimplexLocation::Boundary
                                              : SimplexLocation::Outside;
  return res;
}

struct InteriorNash {
  SimplexPoint point;
  bool unique;
};

/// Interior equalizers are exactly the interior Nash equilibria of Ã.
inline std::optional<InteriorNash> interior_nash(const ModifiedGame& mg, double tol = kDefaultTol) {
  const auto eq = equalizer_set(mg, tol);
  if (eq.kind == EqualizerKind::Empty || !eq.meets_interior(tol)) return std::nullopt;
  return InteriorNash{SimplexPoint::normalized(eq.deepest_point), eq.kind == EqualizerKind::UniquePoint};
}

/// pᵀÃp >= (Ãp)_j - tol for every pure strategy j.
inline bool is_nash(const ModifiedGame& mg, const SimplexPoint& p, double tol = kDefaultTol) {
  const Matrix at = mg.atilde / detail::payoff_scale(mg.atilde);
  const Vector v = at * p.coords();
  return (v.array() <= p.coords().dot(v) + tol).all();
}

/// Strategies k with ã_kk > ã_jk + tol for every j != k (0-based).
inline std::vector<std::size_t> strict_pure_nash(const ModifiedGame& mg, double tol = kDefaultTol) {
  const Matrix at = mg.atilde / detail::payoff_scale(mg.atilde);
  std::vector<std::size_t> out;
  for (Eigen::Index k = 0; k < at.rows(); ++k) {
    bool strict = true;
    for (Eigen::Index j = 0; j < at.rows() && strict; ++j)
      if (j != k && !(at(k, k) > at(j, k) + tol)) strict = false;
    if (strict) out.push_back(static_cast<std::size_t>(k));
  }
  return out;
}

enum class Definiteness { CondPositiveDefinite, CondNegativeDefinite, CondSemidefinite, CondIndefinite };

inline const char* to_string(Definiteness d) {
  switch (d) {
    case Definiteness::CondPositiveDefinite: return "conditionally_positive_definite";
    case Definiteness::CondNegativeDefinite: return "conditionally_negative_definite";
    case Definiteness::CondSemidefinite: return "conditionally_semidefinite";
    case Definiteness::CondIndefinite: return "conditionally_indefinite";
  }
  return "?";
}

struct DefinitenessLabel {
  Definiteness label = Definiteness::CondSemidefinite;
  /// Eigenvalues of the symmetric part restricted to {Σy_i = 0}, ascending.
  Vector eigenvalues;
};

/// Orthonormal basis (n x (n-1)) of the hyperplane {Σy_i = 0}.
inline Matrix zero_sum_basis(Eigen::Index n) {
  Eigen::HouseholderQR<Matrix> qr(Matrix::Ones(n, 1));
  const Matrix q = qr.householderQ();
  return q.rightCols(n - 1);
}

inline DefinitenessLabel conditional_definiteness(const Matrix& m, double tol = kDefaultTol) {
  const Eigen::Index n = m.rows();
  const Matrix sym = 0.5 * (m + m.transpose());
  const double scale = detail::payoff_scale(sym);
  const Matrix q = zero_sum_basis(n);
  const Matrix projected = q.transpose() * (sym / scale) * q;
  Eigen::SelfAdjointEigenSolver<Matrix> es(projected, Eigen::EigenvaluesOnly);
  const Vector ev = es.eigenvalues();

  DefinitenessLabel out;
  out.eigenvalues = ev * scale;
  const bool any_pos = (ev.array() > tol).any();
  const bool any_neg = (ev.array() < -tol).any();
  if ((ev.array() > tol).all()) {
    out.label = Definiteness::CondPositiveDefinite;
  } else if ((ev.array() < -tol).all()) {
    out.label = Definiteness::CondNegativeDefinite;
  } else if (any_pos && any_neg) {
    out.label = Definiteness::CondIndefinite;
  } else {
    out.label = Definiteness::CondSemidefinite;
  }
  return out;
}

/// The common value γ with a_ij + a_ji - a_ii - a_jj = (γ/2)(σ_i² + σ_j²) for
/// all i != j, if one exists. Always exists for two strategies.
inline std::optional<double> dirichlet_condition(const Game& game, double tol = kDefaultTol) {
  const Matrix a = effective_payoff(game);
  const Vector s2 = game.sigma_squared();
  const Eigen::Index n = a.rows();
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  double sum = 0.0;
  int count = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double g = 2.0 * (a(i, j) + a(j, i) - a(i, i) - a(j, j)) / (s2(i) + s2(j));
      lo = std::min(lo, g);
      hi = std::max(hi, g);
      sum += g;
      ++count;
    }
  }
  const double gamma = sum / count;
  if (n == 2) return gamma;
  if (hi - lo <= tol * (1.0 + std::abs(gamma))) return gamma;
  return std::nullopt;
}

/// a_ij + a_ji - a_ii - a_jj = 0 for all pairs; then Πx_i⁻¹ is an invariant density.
inline bool has_reciprocal_density(const Game& game, double tol = kDefaultTol) {
  const Matrix at = modified_game(game).atilde;
  const Matrix s = at / detail::payoff_scale(at);
  const Eigen::Index n = s.rows();
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j)
      if (std::abs(s(i, j) + s(j, i) - s(i, i) - s(j, j)) > tol) return false;
  return true;
}

class DirichletParams {
 public:
  explicit DirichletParams(Vector alpha) : alpha_(std::move(alpha)) {
    if (alpha_.size() < 1 || !alpha_.allFinite() || !(alpha_.array() > 0.0).all())
      throw InvariantError("alpha_i > 0 for all i");
    gamma_ = alpha_.sum();
  }
  const Vector& alpha() const { return alpha_; }
  double gamma() const { return gamma_; }

 private:
  Vector alpha_;
  double gamma_ = 0.0;
};

struct DirichletMoments {
  Vector mean;
  Vector variance;
};

inline DirichletMoments dirichlet_moments(const DirichletParams& p) {
  const double g = p.gamma();
  const Vector& a = p.alpha();
  Vector var = (a.array() * (g - a.array()) / (g * g * (g + 1.0))).matrix();
  return DirichletMoments{a / g, std::move(var)};
}

/// α = γ p when the Dirichlet condition holds with γ > 0 and Ã has a unique
/// interior Nash equilibrium p.
inline std::optional<DirichletParams> dirichlet_invariant(const Game& game, double tol = kDefaultTol) {
  const auto gamma = dirichlet_condition(game, tol);
  if (!gamma || !(*gamma > tol)) return std::nullopt;
  const auto ne = interior_nash(modified_game(game), tol);
  if (!ne || !ne->unique) return std::nullopt;
  return DirichletParams(*gamma * ne->point.coords());
}

enum class DensityClause { None, Equalizing, UnitNegative };

inline const char* to_string(DensityClause c) {
  switch (c) {
    case DensityClause::None: return "none";
    case DensityClause::Equalizing: return "equalizing";
    case DensityClause::UnitNegative: return "unit_negative";
  }
  return "?";
}

struct DensityCertificate {
  bool holds = false;
  DensityClause clause = DensityClause::None;
};

/// Decides whether Πx_i^(α_i - 1) is an invariant density (not necessarily
/// integrable). Two clauses: the equalizing clause (Ãα ∝ 1 under the
/// Dirichlet condition with γ = Σα ≠ -1) and the γ = -1 clause.
inline DensityCertificate dirichlet_density_certificate(const Game& game, const Vector& alpha,
                                                         double tol = kDefaultTol) {
  const ModifiedGame mg = modified_game(game);
  const Matrix& at = mg.atilde;
  const Vector s2 = game.sigma_squared();
  const Eigen::Index n = at.rows();
  const double gamma = alpha.sum();
  const double quad = 0.5 * (s2.array() * alpha.array().square()).sum();

  auto close = [tol](double residual, double magnitude) { return std::abs(residual) <= tol * (1.0 + magnitude); };

  if (!close(gamma + 1.0, std::abs(gamma))) {
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = i + 1; j < n; ++j) {
        const double lhs = at(i, j) + at(j, i) - at(i, i) - at(j, j);
        const double rhs = 0.5 * gamma * (s2(i) + s2(j));
        const double mag = std::abs(at(i, j)) + std::abs(at(j, i)) + std::abs(at(i, i)) + std::abs(at(j, j)) +
                           std::abs(rhs);
        if (!close(lhs - rhs, mag)) return {};
      }
    }
    const Vector v = at * alpha;
    const Vector mag = at.cwiseAbs() * alpha.cwiseAbs();
    for (Eigen::Index i = 1; i < n; ++i)
      if (!close(v(i) - v(0), mag(i) + mag(0))) return {};
    if (close(gamma, 0.0)) {
      const double target = at.diagonal().dot(alpha) - quad;
      const double m = (at.diagonal().cwiseAbs()).dot(alpha.cwiseAbs()) + quad + mag(0);
      if (!close(v(0) - target, m)) return {};
    }
    return {true, DensityClause::Equalizing};
  }

  for (Eigen::Index k = 0; k < n; ++k) {
    const double col = alpha.dot(at.col(k));
    const double r = 0.5 * s2(k) + quad + alpha(k) * s2(k) - at(k, k) - col;
    const double m = 0.5 * s2(k) + quad + std::abs(alpha(k)) * s2(k) + std::abs(at(k, k)) +
                     alpha.cwiseAbs().dot(at.col(k).cwiseAbs());
    if (!close(r, m)) return {};
  }
  return {true, DensityClause::UnitNegative};
}

/// Second invariant density for games with a reciprocal density: β with
/// Σβ = 0, Ãβ ∝ 1 and βᵀÃ != 0 gives Πx_i^(cβ_i - 1), which forces transience.
struct ReciprocalDensityReport {
  bool has_reciprocal_density = false;
  std::optional<Vector> beta;
  std::optional<Vector> beta_payoff;  // βᵀÃ
  std::optional<Vector> second_alpha;
  bool transient = false;
};

inline ReciprocalDensityReport reciprocal_density_analysis(const Game& game, double tol = kDefaultTol) {
  ReciprocalDensityReport rep;
  rep.has_reciprocal_density = has_reciprocal_density(game, tol);
  if (!rep.has_reciprocal_density) return rep;

  const ModifiedGame mg = modified_game(game);
  const Eigen::Index n = mg.atilde.rows();
  const Matrix at = mg.atilde / detail::payoff_scale(mg.atilde);
  const Matrix m = detail::equalizer_system(at);
  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeFullV);
  const Vector& sv = svd.singularValues();
  Eigen::Index rank = 0;
  while (rank < n && sv(rank) > 1e-9 * sv(0)) ++rank;
  if (rank == n) return rep;

  const Matrix null = svd.matrixV().rightCols(n - rank);
  const Matrix g = at.transpose() * null;
  Eigen::JacobiSVD<Matrix> gsvd(g, Eigen::ComputeFullV);
  if (!(gsvd.singularValues()(0) > tol)) return rep;

  Vector beta = null * gsvd.matrixV().col(0);
  beta /= beta.cwiseAbs().maxCoeff();
  for (Eigen::Index i = 0; i < n; ++i) {
    if (std::abs(beta(i)) > tol) {
      if (beta(i) < 0) beta = -beta;
      break;
    }
  }
  const Vector bp = mg.atilde.transpose() * beta;
  const double denom = (game.sigma_squared().array() * beta.array().square()).sum();
  const double c = 2.0 * bp(0) / denom;
  rep.beta = beta;
  rep.beta_payoff = bp;
  rep.second_alpha = c * beta;
  rep.transient = true;
  return rep;
}

struct Domination {
  Vector dominator;  // q ∈ Δ
  double margin;     // δ* in payoff units
};

/// Mixed strategy q with (qᵀÃ)_j >= ã_kj + δ for all j and δ > tol, if any.
inline std::optional<Domination> strictly_dominated(const ModifiedGame& mg, std::size_t k, double tol = kDefaultTol) {
  const Eigen::Index n = mg.atilde.rows();
  if (k >= static_cast<std::size_t>(n)) throw std::out_of_range("strictly_dominated: strategy index out of range");
  const double scale = detail::payoff_scale(mg.atilde);
  const Matrix at = mg.atilde / scale;
  const auto kk = static_cast<Eigen::Index>(k);

  // variables: q_1..q_n >= 0, δ free
  lp::Problem prob(n + 1);
  prob.free_vars[static_cast<std::size_t>(n)] = true;
  prob.objective(n) = 1.0;
  Eigen::RowVectorXd ones = Eigen::RowVectorXd::Zero(n + 1);
  ones.head(n).setOnes();
  prob.add_eq(ones, 1.0);
  for (Eigen::Index j = 0; j < n; ++j) {
    Eigen::RowVectorXd row(n + 1);
    row.head(n) = -at.col(j).transpose();
    row(n) = 1.0;
    prob.add_le(row, -at(kk, j));
  }
  const auto sol = lp::maximize(prob);
  if (sol.status != lp::Status::Optimal || !(sol.value > tol)) return std::nullopt;
  Vector q = sol.x.head(n).cwiseMax(0.0);
  q /= q.sum();
  return Domination{std::move(q), sol.value * scale};
}

struct Separation {
  Vector direction;  // c with Σc_i = 0, |c_i| <= 1
  double margin;     // min_j (cᵀÃ)_j in payoff units
};

/// Direction c with Σc_i = 0 and cᵀÃx > 0 on all of Δ; exists exactly when
/// no equalizer lies in Δ.
inline std::optional<Separation> separating_direction(const ModifiedGame& mg, double tol = kDefaultTol) {
  const Eigen::Index n = mg.atilde.rows();
  const double scale = detail::payoff_scale(mg.atilde);
  const Matrix at = mg.atilde / scale;

  // variables: c_1..c_n free, δ free
  lp::Problem prob(n + 1);
  std::fill(prob.free_vars.begin(), prob.free_vars.end(), true);
  prob.objective(n) = 1.0;
  Eigen::RowVectorXd ones = Eigen::RowVectorXd::Zero(n + 1);
  ones.head(n).setOnes();
  prob.add_eq(ones, 0.0);
  for (Eigen::Index i = 0; i < n; ++i) {
    Eigen::RowVectorXd row = Eigen::RowVectorXd::Zero(n + 1);
    row(i) = 1.0;
    prob.add_le(row, 1.0);
    row(i) = -1.0;
    prob.add_le(row, 1.0);
  }
  for (Eigen::Index j = 0; j < n; ++j) {
    Eigen::RowVectorXd row(n + 1);
    row.head(n) = -at.col(j).transpose();
    row(n) = 1.0;
    prob.add_le(row, 0.0);
  }
  const auto sol = lp::maximize(prob);
  if (sol.status != lp::Status::Optimal || !(sol.value > tol)) return std::nullopt;
  return Separation{sol.x.head(n), sol.value * scale};
}

/// Columns of Ã that are constant vectors (proportional to the all-ones vector).
inline std::vector<std::size_t> constant_columns(const ModifiedGame& mg, double tol = kDefaultTol) {
  const Matrix at = mg.atilde / detail::payoff_scale(mg.atilde);
  std::vector<std::size_t> out;
  for (Eigen::Index j = 0; j < at.cols(); ++j)
    if (at.col(j).maxCoeff() - at.col(j).minCoeff() <= tol) out.push_back(static_cast<std::size_t>(j));
  return out;
}

inline bool is_skew_symmetric(const Matrix& m, double tol = kDefaultTol) {
  const double scale = detail::payoff_scale(m);
  return ((m + m.transpose()) / scale).cwiseAbs().maxCoeff() <= tol;
}

}  // namespace sreplicator
