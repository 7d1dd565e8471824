#pragma once

// Dense primal-dual interior-point solver for moment-form SDPs.
//
// The moment vector m is the free primal variable. PSD pencils and one-sided
// linear constraints enter as slack blocks S(m) = C + sum_k m_k A_k >= 0,
// equalities are kept as linear rows. Iterates follow the HKM search
// direction with a Mehrotra predictor-corrector step; the Schur complement
// is formed densely and factorized with Cholesky.

#include <iosfwd>

#include "dstab/relax.hpp"

namespace dstab {

struct SolverSettings {
  int max_iterations = 200;
  double feasibility_tolerance = 1e-8;
  double gap_tolerance = 1e-8;
  /// Fraction of the distance to the cone boundary taken per step.
  double step_fraction = 0.98;
  /// X0 = Z0 = initial_scale * I.
  double initial_scale = 1.0;
  /// Dual-ray magnitude beyond which a primal infeasibility certificate is
  /// tested (and the primal objective magnitude that flags unboundedness).
  double infeasibility_threshold = 1e8;
  /// One line per iteration when non-null.
  std::ostream* log = nullptr;

  void validate() const;
};

SDPSolution solve(const SDPProblem& sdp, const SolverSettings& settings = {});

/// Residuals recomputed from the problem data and the returned solution.
Residuals residuals(const SDPProblem& sdp, const SDPSolution& solution);

/// Minimum eigenvalue of each assembled PSD block at the given moments.
std::vector<double> block_min_eigenvalues(const SDPProblem& sdp, const MomentVector& m);

/// Worst violation of the linear constraints and PSD blocks at m (>= 0).
double primal_infeasibility(const SDPProblem& sdp, const MomentVector& m);

}  // namespace dstab
