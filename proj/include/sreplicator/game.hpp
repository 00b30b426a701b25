#pragma once

// Symmetric two-player games under Gaussian aggregate shocks: the payoff
// matrix, per-strategy noise, and the coefficients of the stochastic
// replicator equation on the simplex.

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace sreplicator {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Thrown when a game, point or configuration violates one of its invariants.
/// The message names the violated invariant.
class InvariantError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class Interpretation { Ito, Stratonovich };

inline const char* to_string(Interpretation i) {
  return i == Interpretation::Ito ? "ito" : "stratonovich";
}

class Game {
 public:
  Game(Matrix payoff, Vector sigma, Interpretation interpretation = Interpretation::Ito)
      : payoff_(std::move(payoff)), sigma_(std::move(sigma)), interpretation_(interpretation) {
    if (payoff_.rows() < 2) throw InvariantError("n >= 2: a game needs at least two strategies");
    if (payoff_.rows() != payoff_.cols()) throw InvariantError("payoff is square with side n");
    if (sigma_.size() != payoff_.rows()) throw InvariantError("sigma has length n");
    if (!payoff_.allFinite()) throw InvariantError("all entries of payoff are finite");
    for (Eigen::Index i = 0; i < sigma_.size(); ++i) {
      if (!std::isfinite(sigma_(i)) || !(sigma_(i) > 0.0))
        throw InvariantError("sigma_i > 0 for every i");
    }
  }

  std::size_t n() const { return static_cast<std::size_t>(payoff_.rows()); }
  const Matrix& payoff() const { return payoff_; }
  const Vector& sigma() const { return sigma_; }
  Interpretation interpretation() const { return interpretation_; }

  Vector sigma_squared() const { return sigma_.array().square().matrix(); }

 private:
  Matrix payoff_;
  Vector sigma_;
  Interpretation interpretation_;
};

/// The game Ã with ã_ij = a_ij - σ_i²/2 computed from the effective payoff.
struct ModifiedGame {
  Matrix atilde;
  Vector sigma;

  std::size_t n() const { return static_cast<std::size_t>(atilde.rows()); }
};

/// A point of the probability simplex. Construction checks nonnegativity and
/// that the coordinates sum to one within 4n machine epsilons.
class SimplexPoint {
 public:
  explicit SimplexPoint(Vector x) : x_(std::move(x)) {
    if (x_.size() < 1) throw InvariantError("simplex point must have at least one coordinate");
    if (!x_.allFinite()) throw InvariantError("simplex point coordinates are finite");
    if ((x_.array() < 0.0).any()) throw InvariantError("x_i >= 0 for all i");
    if (std::abs(x_.sum() - 1.0) > tolerance(x_.size()))
      throw InvariantError("coordinates of a simplex point sum to 1");
  }

  /// Scales a positive vector onto the simplex.
  static SimplexPoint normalized(const Vector& v) {
    const double s = v.sum();
    if (!(s > 0.0) || !std::isfinite(s)) throw InvariantError("cannot normalize onto the simplex");
    return SimplexPoint(v / s);
  }

  static SimplexPoint vertex(std::size_t n, std::size_t k) {
    Vector e = Vector::Zero(static_cast<Eigen::Index>(n));
    e(static_cast<Eigen::Index>(k)) = 1.0;
    return SimplexPoint(std::move(e));
  }

  static SimplexPoint barycenter(std::size_t n) {
    return SimplexPoint(Vector::Constant(static_cast<Eigen::Index>(n), 1.0 / static_cast<double>(n)));
  }

  static double tolerance(Eigen::Index n) {
    return 4.0 * static_cast<double>(n) * std::numeric_limits<double>::epsilon();
  }

  bool interior() const { return (x_.array() > 0.0).all(); }
  std::size_t n() const { return static_cast<std::size_t>(x_.size()); }
  const Vector& coords() const { return x_; }
  double operator[](std::size_t i) const { return x_(static_cast<Eigen::Index>(i)); }

 private:
  Vector x_;
};

/// A with σ_i²/2 added to every entry of row i when the noise is read in the
/// Stratonovich sense; A itself otherwise.
inline Matrix effective_payoff(const Game& game) {
  Matrix a = game.payoff();
  if (game.interpretation() == Interpretation::Stratonovich) {
    a.colwise() += 0.5 * game.sigma_squared();
  }
  return a;
}

inline ModifiedGame modified_game(const Game& game) {
  Matrix at = effective_payoff(game);
  at.colwise() -= 0.5 * game.sigma_squared();
  return ModifiedGame{std::move(at), game.sigma()};
}

/// b(x) = [diag(x) - x xᵀ][A - diag(σ²)] x
inline Vector drift(const Game& game, const SimplexPoint& point) {
  const Vector& x = point.coords();
  Matrix m = effective_payoff(game);
  m.diagonal() -= game.sigma_squared();
  const Vector mx = m * x;
  const double mean = x.dot(mx);
  return x.cwiseProduct(mx) - mean * x;
}

/// C(x) = [diag(x) - x xᵀ] diag(σ)
inline Matrix diffusion_matrix(const Game& game, const SimplexPoint& point) {
  const Vector& x = point.coords();
  Matrix proj = -x * x.transpose();
  proj.diagonal() += x;
  return proj * game.sigma().asDiagonal();
}

/// Adds c to every entry of column j of the raw payoff matrix. The replicator
/// process is unchanged by such shifts.
inline Game shift_column(const Game& game, std::size_t j, double c) {
  if (j >= game.n()) throw std::out_of_range("shift_column: column index out of range");
  Matrix a = game.payoff();
  a.col(static_cast<Eigen::Index>(j)).array() += c;
  return Game(std::move(a), game.sigma(), game.interpretation());
}

/// Simultaneous relabeling of strategies: new strategy i is old strategy perm[i].
inline Game permute(const Game& game, const std::vector<std::size_t>& perm) {
  const auto n = static_cast<Eigen::Index>(game.n());
  if (perm.size() != game.n()) throw std::invalid_argument("permutation has length n");
  Matrix a(n, n);
  Vector s(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    s(i) = game.sigma()(static_cast<Eigen::Index>(perm[static_cast<std::size_t>(i)]));
    for (Eigen::Index j = 0; j < n; ++j)
      a(i, j) = game.payoff()(static_cast<Eigen::Index>(perm[static_cast<std::size_t>(i)]),
                              static_cast<Eigen::Index>(perm[static_cast<std::size_t>(j)]));
  }
  return Game(std::move(a), std::move(s), game.interpretation());
}

}  // namespace sreplicator
