#pragma once

// Minimal dense two-phase simplex method for the small linear programs that
// certify domination and separation. Problems have at most a few dozen
// variables, so a full tableau with Bland's anti-cycling rule is enough.

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

namespace sreplicator::lp {

enum class Status { Optimal, Infeasible, Unbounded };

/// maximize objectiveᵀx  s.t.  a_le x <= b_le,  a_eq x = b_eq,
/// x_j >= 0 unless free_vars[j].
struct Problem {
  Eigen::VectorXd objective;
  Eigen::MatrixXd a_le;
  Eigen::VectorXd b_le;
  Eigen::MatrixXd a_eq;
  Eigen::VectorXd b_eq;
  std::vector<bool> free_vars;

  explicit Problem(Eigen::Index num_vars)
      : objective(Eigen::VectorXd::Zero(num_vars)),
        a_le(0, num_vars),
        b_le(0),
        a_eq(0, num_vars),
        b_eq(0),
        free_vars(static_cast<std::size_t>(num_vars), false) {}

  Eigen::Index num_vars() const { return objective.size(); }

  void add_le(const Eigen::RowVectorXd& row, double rhs) {
    a_le.conservativeResize(a_le.rows() + 1, Eigen::NoChange);
    a_le.row(a_le.rows() - 1) = row;
    b_le.conservativeResize(b_le.size() + 1);
    b_le(b_le.size() - 1) = rhs;
  }

  void add_eq(const Eigen::RowVectorXd& row, double rhs) {
    a_eq.conservativeResize(a_eq.rows() + 1, Eigen::NoChange);
    a_eq.row(a_eq.rows() - 1) = row;
    b_eq.conservativeResize(b_eq.size() + 1);
    b_eq(b_eq.size() - 1) = rhs;
  }
};

struct Solution {
  Status status = Status::Infeasible;
  Eigen::VectorXd x;
  double value = -std::numeric_limits<double>::infinity();
};

namespace detail {

class Tableau {
 public:
  Tableau(Eigen::MatrixXd t, std::vector<Eigen::Index> basis)
      : t_(std::move(t)), basis_(std::move(basis)) {}

  // Maximizes the objective stored in the last row (as reduced costs, i.e.
  // row = -c) over columns [0, allowed). Returns false if unbounded.
  bool optimize(Eigen::Index allowed) {
    const Eigen::Index m = t_.rows() - 1;
    const Eigen::Index rhs = t_.cols() - 1;
    for (int iter = 0; iter < 10000; ++iter) {
      Eigen::Index enter = -1;
      for (Eigen::Index j = 0; j < allowed; ++j) {
        if (t_(m, j) < -kPivotTol) {
          enter = j;
          break;
        }
      }
      if (enter < 0) return true;
      Eigen::Index leave = -1;
      double best = std::numeric_limits<double>::infinity();
      for (Eigen::Index i = 0; i < m; ++i) {
        const double a = t_(i, enter);
        if (a > kPivotTol) {
          const double ratio = t_(i, rhs) / a;
          if (ratio < best - 1e-14 ||
              (std::abs(ratio - best) <= 1e-14 && leave >= 0 && basis_[i] < basis_[leave])) {
            best = ratio;
            leave = i;
          }
        }
      }
      if (leave < 0) return false;
      pivot(leave, enter);
    }
    return true;
  }

  void pivot(Eigen::Index row, Eigen::Index col) {
    t_.row(row) /= t_(row, col);
    for (Eigen::Index i = 0; i < t_.rows(); ++i) {
      if (i != row && t_(i, col) != 0.0) t_.row(i) -= t_(i, col) * t_.row(row);
    }
    basis_[static_cast<std::size_t>(row)] = col;
  }

  Eigen::MatrixXd& table() { return t_; }
  std::vector<Eigen::Index>& basis() { return basis_; }

  static constexpr double kPivotTol = 1e-11;

 private:
  Eigen::MatrixXd t_;
  std::vector<Eigen::Index> basis_;
};

}  // namespace detail

inline Solution maximize(const Problem& p) {
  const Eigen::Index nv = p.num_vars();
  // Column layout: split variables, then slacks, then artificials.
  std::vector<Eigen::Index> col_of(static_cast<std::size_t>(nv));
  std::vector<Eigen::Index> neg_col(static_cast<std::size_t>(nv), -1);
  Eigen::Index cols = 0;
  for (Eigen::Index j = 0; j < nv; ++j) {
    col_of[static_cast<std::size_t>(j)] = cols++;
    if (p.free_vars[static_cast<std::size_t>(j)]) neg_col[static_cast<std::size_t>(j)] = cols++;
  }
  const Eigen::Index n_struct = cols;
  const Eigen::Index n_le = p.a_le.rows();
  const Eigen::Index n_eq = p.a_eq.rows();
  const Eigen::Index m = n_le + n_eq;
  const Eigen::Index n_slack = n_le;
  const Eigen::Index n_total = n_struct + n_slack + m;
  const Eigen::Index rhs = n_total;

  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(m + 1, n_total + 1);
  auto fill_row = [&](Eigen::Index r, const Eigen::RowVectorXd& a, double b, Eigen::Index slack) {
    for (Eigen::Index j = 0; j < nv; ++j) {
      t(r, col_of[static_cast<std::size_t>(j)]) = a(j);
      if (neg_col[static_cast<std::size_t>(j)] >= 0) t(r, neg_col[static_cast<std::size_t>(j)]) = -a(j);
    }
    if (slack >= 0) t(r, slack) = 1.0;
    t(r, rhs) = b;
    if (b < 0.0) t.row(r) *= -1.0;
    t(r, n_struct + n_slack + r) = 1.0;
  };
  for (Eigen::Index i = 0; i < n_le; ++i) fill_row(i, p.a_le.row(i), p.b_le(i), n_struct + i);
  for (Eigen::Index i = 0; i < n_eq; ++i) fill_row(n_le + i, p.a_eq.row(i), p.b_eq(i), -1);

  std::vector<Eigen::Index> basis(static_cast<std::size_t>(m));
  for (Eigen::Index i = 0; i < m; ++i) basis[static_cast<std::size_t>(i)] = n_struct + n_slack + i;

  // Phase one: maximize -sum(artificials), written in reduced form.
  for (Eigen::Index i = 0; i < m; ++i) t.row(m) -= t.row(i);
  for (Eigen::Index i = 0; i < m; ++i) t(m, n_struct + n_slack + i) = 0.0;

  detail::Tableau tab(std::move(t), std::move(basis));
  tab.optimize(n_total);
  Eigen::MatrixXd& tt = tab.table();
  const double infeas = -tt(m, rhs);
  double scale = 1.0;
  if (p.b_le.size() > 0) scale = std::max(scale, p.b_le.cwiseAbs().maxCoeff());
  if (p.b_eq.size() > 0) scale = std::max(scale, p.b_eq.cwiseAbs().maxCoeff());
  if (std::abs(infeas) > 1e-9 * scale) return Solution{Status::Infeasible, {}, -std::numeric_limits<double>::infinity()};

  // Drive artificials out of the basis where possible; rows where that is
  // impossible are redundant and keep their artificial pinned at zero.
  for (Eigen::Index i = 0; i < m; ++i) {
    if (tab.basis()[static_cast<std::size_t>(i)] < n_struct + n_slack) continue;
    Eigen::Index col = -1;
    for (Eigen::Index j = 0; j < n_struct + n_slack; ++j) {
      if (std::abs(tt(i, j)) > 1e-9) {
        col = j;
        break;
      }
    }
    if (col >= 0) tab.pivot(i, col);
  }

  // Phase two objective row: -c in structural columns, reduced against basis.
  tt.row(m).setZero();
  for (Eigen::Index j = 0; j < nv; ++j) {
    tt(m, col_of[static_cast<std::size_t>(j)]) = -p.objective(j);
    if (neg_col[static_cast<std::size_t>(j)] >= 0) tt(m, neg_col[static_cast<std::size_t>(j)]) = p.objective(j);
  }
  for (Eigen::Index i = 0; i < m; ++i) {
    const Eigen::Index b = tab.basis()[static_cast<std::size_t>(i)];
    if (tt(m, b) != 0.0) tt.row(m) -= tt(m, b) * tt.row(i);
  }
  // Artificial columns may not re-enter.
  if (!tab.optimize(n_struct + n_slack)) {
    return Solution{Status::Unbounded, {}, std::numeric_limits<double>::infinity()};
  }

  Eigen::VectorXd col_value = Eigen::VectorXd::Zero(n_total);
  for (Eigen::Index i = 0; i < m; ++i) col_value(tab.basis()[static_cast<std::size_t>(i)]) = tt(i, rhs);
  Eigen::VectorXd x(nv);
  for (Eigen::Index j = 0; j < nv; ++j) {
    x(j) = col_value(col_of[static_cast<std::size_t>(j)]);
    if (neg_col[static_cast<std::size_t>(j)] >= 0) x(j) -= col_value(neg_col[static_cast<std::size_t>(j)]);
  }
  return Solution{Status::Optimal, x, p.objective.dot(x)};
}

}  // namespace sreplicator::lp
