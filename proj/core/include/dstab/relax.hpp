#pragma once

// Order-tau moment relaxation of the lifted eigen-violation problem.

#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dstab/moments.hpp"
#include "dstab/problem.hpp"

namespace dstab {

enum class EqualityEncoding {
  /// q = 0 becomes the two localizing constraints M(q m) >= 0, M(-q m) >= 0.
  InequalityPair,
  /// q = 0 becomes the linear constraints M(q m) = 0.
  ZeroLocalizing,
};

struct RelaxationOptions {
  EqualityEncoding equality_encoding = EqualityEncoding::InequalityPair;
  /// Rescale every coordinate by LiftedProblem::coordinate_scale so that the
  /// support fits in the unit box. Moments are then those of the scaled
  /// variables; SDPProblem::variable_scale records the factors.
  bool scale_variables = true;
  /// Drop polynomial coefficients with |c| <= prune_epsilon after scaling.
  double prune_epsilon = 0.0;
  /// Shared cache for localizing forms; a private one is used when null.
  std::shared_ptr<FormCache> cache;
};

/// sum_alpha a_alpha m_alpha (relation) rhs, indexed by moment position.
struct LinearConstraint {
  std::vector<std::pair<std::size_t, double>> coefficients;
  MomentRelation relation = MomentRelation::Equal;
  double rhs = 0.0;
  std::string label;
};

struct PsdBlock {
  std::shared_ptr<const LinearMatrixForm> form;
  std::string label;
  /// Columns span vectors v with form(m) v = 0 for every m meeting the
  /// equality constraints. The solver restricts the block to their complement.
  Eigen::MatrixXd kernel;
};

/// maximize objective . m  s.t. linear constraints, every block form(m) >= 0.
struct SDPProblem {
  int tau = 0;
  std::size_t num_vars = 0;
  std::shared_ptr<const MonomialBasis> basis;  // order 2*tau
  Eigen::VectorXd objective;
  std::vector<LinearConstraint> constraints;
  std::size_t normalization_index = 0;
  std::vector<PsdBlock> blocks;  // blocks[0] is the moment matrix
  /// z = variable_scale .* z_relaxation, coordinate-wise.
  std::vector<double> variable_scale;
  std::vector<std::string> variable_names;

  std::size_t num_moments() const { return basis ? basis->size() : 0; }
};

enum class SolveStatus { Optimal, Infeasible, Unbounded, SlowProgress, IterLimit };
std::string to_string(SolveStatus status);

struct Residuals {
  double primal_infeasibility = 0.0;
  double dual_infeasibility = 0.0;
  /// dual_value - primal_value.
  double gap = 0.0;
};

struct SDPSolution {
  MomentVector moments;
  double primal_value = 0.0;
  double dual_value = 0.0;
  /// One multiplier per SDPProblem::constraints entry.
  Eigen::VectorXd dual_multipliers;
  /// One dual matrix per SDPProblem::blocks entry.
  std::vector<Eigen::MatrixXd> dual_blocks;
  SolveStatus status = SolveStatus::IterLimit;
  int iterations = 0;
  Residuals residuals;
  /// Farkas-type ray (dual multipliers, dual blocks) when Infeasible.
  std::optional<std::pair<Eigen::VectorXd, std::vector<Eigen::MatrixXd>>> certificate;
};

/// Requires tau >= minimal_order(lifted).
SDPProblem assemble_relaxation(const LiftedProblem& lifted, int tau,
                               const RelaxationOptions& options = {});

/// Maps a point of the lifted space into the relaxation's coordinates.
std::vector<double> to_relaxation_coordinates(const SDPProblem& sdp, std::span<const double> z);

/// Moments (in relaxation coordinates) of an atomic measure on the lifted space.
MomentVector relaxation_moments(const SDPProblem& sdp,
                                const std::vector<std::vector<double>>& atoms,
                                std::span<const double> weights);

struct ProblemStats {
  std::size_t num_moments = 0;
  std::size_t num_vars = 0;
  int tau = 0;
  std::size_t moment_block_size = 0;
  std::vector<std::size_t> block_sizes;
  std::size_t linear_equalities = 0;
  std::size_t linear_inequalities = 0;
};

ProblemStats problem_stats(const SDPProblem& sdp);

/// Sparse text dump:
///
///   dstab-sdp 1
///   vars <n> tau <t> moments <N>
///   moment <index> <e_1> ... <e_n>             (N lines)
///   objective <index> <value>                   (nonzeros)
///   linear <id> <=|<=|>=> <rhs> <nnz>, then "<index> <value>" lines
///   block <id> <dim> <nnz>, then "<index> <row> <col> <value>" lines, row <= col
void export_sdp(const SDPProblem& sdp, std::ostream& out);

}  // namespace dstab
