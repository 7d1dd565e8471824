#pragma once

// Brute-force checks that do not go through the relaxation: a small dense
// eigensolver, grid search for violating parameters and an atomic-measure LP
// giving lower bounds on the violation probability.

#include <complex>
#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "dstab/problem.hpp"

namespace dstab {

struct Eigenpair {
  std::complex<double> value;
  Eigen::VectorXcd vector;  // unit 2-norm
  /// ||(M - value I) vector||.
  double residual = 0.0;
};

/// Eigenvalues via Householder-Hessenberg reduction and Francis double-shift
/// QR on the balanced matrix. Sorted by decreasing real part, then by
/// decreasing imaginary part. Throws on non-convergence. Intended for n <= 64.
std::vector<std::complex<double>> eigenvalues(const Eigen::MatrixXd& m);

/// Eigenvalues plus unit eigenvectors from inverse iteration.
std::vector<Eigenpair> eigenpairs(const Eigen::MatrixXd& m);

/// Membership tolerance used to classify eigenvalues as lying in D^c.
inline constexpr double kViolationTolerance = 1e-9;

struct ViolationWitness {
  std::vector<double> rho;
  std::complex<double> lambda;
  /// Depth of lambda inside D^c (membership margin, >= -tolerance).
  double min_region_residual = 0.0;
  double eig_residual = 0.0;
};

/// Deepest eigenvalue of A(rho) inside D^c, if any lies there.
std::optional<ViolationWitness> violation_at(const DStabilityProblem& problem,
                                             std::span<const double> rho,
                                             double tol = kViolationTolerance);

struct GridOptions {
  double tolerance = kViolationTolerance;
  /// Used only when delta is not a box.
  std::uint64_t seed = 1;
};

/// Grid points over a box delta (points_per_axis per coordinate, endpoints
/// included), or points_per_axis^k uniform samples from the bounding box kept
/// when they lie in delta.
std::vector<std::vector<double>> sample_delta(const SemialgebraicSet& delta, int points_per_axis,
                                              std::uint64_t seed = 1);

/// Scans the sample of delta and returns the deepest witness. Ties keep the
/// lowest sample index.
std::optional<ViolationWitness> grid_violation_search(const DStabilityProblem& problem,
                                                      int points_per_axis,
                                                      const GridOptions& options = {});

struct AbscissaScan {
  double max_real_part = 0.0;
  std::vector<double> rho;  // where it is attained
  std::size_t points = 0;
};

/// Largest real part of any eigenvalue of A(rho) over the sample of delta.
AbscissaScan max_real_part(const DStabilityProblem& problem, int points_per_axis,
                           std::uint64_t seed = 1);

struct AtomicLPResult {
  std::vector<std::vector<double>> atoms;
  std::vector<double> weights;
  std::vector<bool> violating;
  double lower_bound = 0.0;
};

/// Maximizes the violating mass over probability measures on the atoms that
/// satisfy the problem's moment constraints. Throws when no such measure
/// exists on these atoms.
AtomicLPResult atomic_lp_bound(const DStabilityProblem& problem,
                               const std::vector<std::vector<double>>& atoms,
                               double tol = kViolationTolerance);

}  // namespace dstab
