#include "dstab/simplex.hpp"

#include <limits>

#include "dstab/error.hpp"

namespace dstab {

namespace {

using Eigen::Index;

class Tableau {
 public:
  Tableau(Eigen::MatrixXd t, std::vector<Index> basis, Index usable, double tol)
      : t_(std::move(t)), basis_(std::move(basis)), usable_(usable), tol_(tol) {}

  // Sets the objective row for maximizing cost^T x over the current basis.
  void set_objective(const Eigen::VectorXd& cost) {
    const Index m = rows();
    t_.row(m).setZero();
    for (Index j = 0; j < cols(); ++j) t_(m, j) = -cost[j];
    for (Index i = 0; i < m; ++i) {
      const double cb = cost[basis_[static_cast<std::size_t>(i)]];
      if (cb != 0.0) t_.row(m) += cb * t_.row(i);
    }
  }

  // Bland's rule: lowest-index improving column, lowest-index leaving basic
  // variable among ratio ties. Returns false when unbounded.
  bool optimize() {
    const Index m = rows();
    for (;;) {
      Index enter = -1;
      for (Index j = 0; j < usable_; ++j) {
        if (t_(m, j) < -tol_) {
          enter = j;
          break;
        }
      }
      if (enter < 0) return true;
      Index leave = -1;
      double best = std::numeric_limits<double>::infinity();
      for (Index i = 0; i < m; ++i) {
        const double a = t_(i, enter);
        if (a <= tol_) continue;
        const double ratio = t_(i, cols()) / a;
        if (ratio < best - tol_ ||
            (ratio <= best + tol_ && leave >= 0 &&
             basis_[static_cast<std::size_t>(i)] < basis_[static_cast<std::size_t>(leave)])) {
          if (ratio < best - tol_ || leave < 0) best = ratio;
          leave = i;
        }
      }
      if (leave < 0) return false;
      pivot(leave, enter);
    }
  }

  void pivot(Index r, Index c) {
    t_.row(r) /= t_(r, c);
    for (Index i = 0; i < t_.rows(); ++i) {
      if (i != r && t_(i, c) != 0.0) t_.row(i) -= t_(i, c) * t_.row(r);
    }
    basis_[static_cast<std::size_t>(r)] = c;
  }

  Index rows() const { return t_.rows() - 1; }
  Index cols() const { return t_.cols() - 1; }
  double value() const { return t_(rows(), cols()); }
  double rhs(Index i) const { return t_(i, cols()); }
  double at(Index i, Index j) const { return t_(i, j); }
  Index basic(Index i) const { return basis_[static_cast<std::size_t>(i)]; }
  void restrict_columns(Index usable) { usable_ = usable; }

 private:
  Eigen::MatrixXd t_;
  std::vector<Index> basis_;
  Index usable_;
  double tol_;
};

}  // namespace

LPResult solve_lp(const Eigen::VectorXd& c, const Eigen::MatrixXd& a,
                  const std::vector<MomentRelation>& relations, const Eigen::VectorXd& b,
                  double tol) {
  const Index m = a.rows();
  const Index n = a.cols();
  if (c.size() != n || b.size() != m || static_cast<Index>(relations.size()) != m) {
    throw Error("solve_lp: dimension mismatch");
  }
  Eigen::MatrixXd rows = a;
  Eigen::VectorXd rhs = b;
  std::vector<MomentRelation> rel = relations;
  Index slacks = 0, artificials = 0;
  for (Index i = 0; i < m; ++i) {
    if (rhs[i] < 0.0) {
      rows.row(i) *= -1.0;
      rhs[i] = -rhs[i];
      if (rel[static_cast<std::size_t>(i)] == MomentRelation::LessEqual) {
        rel[static_cast<std::size_t>(i)] = MomentRelation::GreaterEqual;
      } else if (rel[static_cast<std::size_t>(i)] == MomentRelation::GreaterEqual) {
        rel[static_cast<std::size_t>(i)] = MomentRelation::LessEqual;
      }
    }
    if (rel[static_cast<std::size_t>(i)] != MomentRelation::Equal) ++slacks;
    if (rel[static_cast<std::size_t>(i)] != MomentRelation::LessEqual) ++artificials;
  }

  const Index total = n + slacks + artificials;
  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(m + 1, total + 1);
  std::vector<Index> basis(static_cast<std::size_t>(m));
  Index s = n, art = n + slacks;
  for (Index i = 0; i < m; ++i) {
    t.row(i).head(n) = rows.row(i);
    t(i, total) = rhs[i];
    const auto r = rel[static_cast<std::size_t>(i)];
    if (r == MomentRelation::LessEqual) {
      t(i, s) = 1.0;
      basis[static_cast<std::size_t>(i)] = s++;
    } else {
      if (r == MomentRelation::GreaterEqual) t(i, s++) = -1.0;
      t(i, art) = 1.0;
      basis[static_cast<std::size_t>(i)] = art++;
    }
  }

  Tableau tab(std::move(t), std::move(basis), total, tol);
  LPResult result;
  if (artificials > 0) {
    Eigen::VectorXd phase1 = Eigen::VectorXd::Zero(total);
    phase1.tail(artificials).setConstant(-1.0);
    tab.set_objective(phase1);
    tab.optimize();
    if (tab.value() < -1e3 * tol * (1.0 + rhs.lpNorm<Eigen::Infinity>())) {
      result.status = LPStatus::Infeasible;
      return result;
    }
    // Pivot remaining zero-level artificials out where possible.
    for (Index i = 0; i < m; ++i) {
      if (tab.basic(i) < n + slacks) continue;
      for (Index j = 0; j < n + slacks; ++j) {
        if (std::abs(tab.at(i, j)) > tol) {
          tab.pivot(i, j);
          break;
        }
      }
    }
    tab.restrict_columns(n + slacks);
  }
  Eigen::VectorXd cost = Eigen::VectorXd::Zero(total);
  cost.head(n) = c;
  tab.set_objective(cost);
  if (!tab.optimize()) {
    result.status = LPStatus::Unbounded;
    return result;
  }
  result.status = LPStatus::Optimal;
  result.x = Eigen::VectorXd::Zero(n);
  for (Index i = 0; i < m; ++i) {
    if (tab.basic(i) < n) result.x[tab.basic(i)] = tab.rhs(i);
  }
  result.objective = c.dot(result.x);
  return result;
}

}  // namespace dstab
