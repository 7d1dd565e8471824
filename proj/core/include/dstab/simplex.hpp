#pragma once

// Dense two-phase tableau simplex with Bland's rule.

#include <vector>

#include <Eigen/Dense>

#include "dstab/problem.hpp"

namespace dstab {

enum class LPStatus { Optimal, Infeasible, Unbounded };

struct LPResult {
  LPStatus status = LPStatus::Infeasible;
  Eigen::VectorXd x;
  double objective = 0.0;
};

/// maximize c^T x  s.t.  A_i x (relation_i) b_i,  x >= 0.
LPResult solve_lp(const Eigen::VectorXd& c, const Eigen::MatrixXd& a,
                  const std::vector<MomentRelation>& relations, const Eigen::VectorXd& b,
                  double tol = 1e-10);

}  // namespace dstab
