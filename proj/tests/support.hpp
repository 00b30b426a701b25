#pragma once

// Fixtures shared by the unit tests: the canonical games and seeded random
// games, points and matrices.

#include "sreplicator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace fixtures {

using sreplicator::Game;
using sreplicator::Interpretation;
using sreplicator::Matrix;
using sreplicator::SimplexPoint;
using sreplicator::Vector;

inline Matrix mat(std::initializer_list<std::initializer_list<double>> rows) {
  Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.begin()->size()));
  Eigen::Index i = 0;
  for (const auto& r : rows) {
    Eigen::Index j = 0;
    for (const double v : r) m(i, j++) = v;
    ++i;
  }
  return m;
}

inline Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (const double x : v) out(i++) = x;
  return out;
}

inline Vector constant(Eigen::Index n, double v) { return Vector::Constant(n, v); }

// Games given through their modified payoff Ã with equal noise σ: the raw
// payoff is Ã + σ²/2 in every row.
inline Game from_modified(const Matrix& atilde, double sigma) {
  Matrix a = atilde.array() + 0.5 * sigma * sigma;
  return Game(a, constant(atilde.rows(), sigma));
}

inline Game matching(double sigma = 1.0, Interpretation i = Interpretation::Ito) {
  return Game(mat({{0, 1}, {1, 0}}), constant(2, sigma), i);
}

inline Matrix rsp_payoff(double a1, double a2) { return mat({{0, -a1, a2}, {a2, 0, -a1}, {-a1, a2, 0}}); }

inline Game rsp(double a1, double a2, double sigma = 0.5) { return Game(rsp_payoff(a1, a2), constant(3, sigma)); }

inline Game bistable() { return from_modified(mat({{1, 0}, {0, 1}}), 0.5); }
inline Game boundary_tie() { return from_modified(mat({{0, 1}, {0, 0}}), 0.5); }
inline Game dominance() { return from_modified(mat({{1, 1}, {0, 0}}), 0.5); }
inline Game skew_second_density() { return Game(mat({{0.5, 1.5}, {-0.5, 0.5}}), constant(2, 1.0)); }
inline Game dominated_by_mix() { return from_modified(mat({{4, 0, 2}, {0, 4, 2}, {1.5, 1.5, 1.5}}), 0.5); }
inline Game constant_column() { return from_modified(mat({{0, 1, 2}, {0, 2, 0}, {0, 0, 1}}), 0.5); }

struct Random {
  explicit Random(std::uint64_t seed) : eng(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(eng); }
  double normal() { return std::normal_distribution<double>(0.0, 1.0)(eng); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(eng); }

  Matrix matrix(Eigen::Index n, double lo = -2.0, double hi = 2.0) {
    Matrix m(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j) m(i, j) = uniform(lo, hi);
    return m;
  }

  Vector sigma(Eigen::Index n) {
    Vector s(n);
    for (Eigen::Index i = 0; i < n; ++i) s(i) = uniform(0.1, 1.5);
    return s;
  }

  Game game(Eigen::Index n, Interpretation interp = Interpretation::Ito) { return Game(matrix(n), sigma(n), interp); }

  SimplexPoint interior_point(Eigen::Index n) {
    Vector x(n);
    for (Eigen::Index i = 0; i < n; ++i) x(i) = -std::log(uniform(1e-12, 1.0));
    return SimplexPoint::normalized(x);
  }

  // Uniform direction in the hyperplane {Σy = 0}.
  Vector zero_sum_direction(Eigen::Index n) {
    Vector y(n);
    for (Eigen::Index i = 0; i < n; ++i) y(i) = normal();
    y.array() -= y.mean();
    return y / y.norm();
  }

  std::vector<std::size_t> permutation(std::size_t n) {
    std::vector<std::size_t> p(n);
    for (std::size_t i = 0; i < n; ++i) p[i] = i;
    std::shuffle(p.begin(), p.end(), eng);
    return p;
  }

  std::mt19937_64 eng;
};

}  // namespace fixtures
