#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dstab/poly.hpp"
#include "dstab/sets.hpp"

namespace dstab {

/// Square matrix whose entries are polynomials in the uncertain parameters.
class UncertainMatrix {
 public:
  UncertainMatrix() = default;
  /// `entries` are row-major, size*size of them, all over `variables`.
  UncertainMatrix(std::vector<std::string> variables, std::size_t size,
                  std::vector<Polynomial> entries);

  std::size_t size() const { return size_; }
  const std::vector<std::string>& variables() const { return variables_; }
  const Polynomial& entry(std::size_t row, std::size_t col) const {
    return entries_[row * size_ + col];
  }
  const std::vector<Polynomial>& entries() const { return entries_; }
  int degree() const;

  /// Entry (i,j) - entry (j,i) is the zero polynomial for every pair.
  bool is_symmetric() const;

  Eigen::MatrixXd evaluate(std::span<const double> rho) const;

  bool operator==(const UncertainMatrix&) const = default;

 private:
  std::vector<std::string> variables_;
  std::size_t size_ = 0;
  std::vector<Polynomial> entries_;
};

enum class MomentRelation { Equal, LessEqual, GreaterEqual };

/// E[f(rho)] relation target.
struct MomentConstraint {
  Polynomial f;
  MomentRelation relation = MomentRelation::Equal;
  double target = 0.0;

  bool operator==(const MomentConstraint&) const = default;
};

enum class EigenSpace { Real, Complex };

std::string to_string(EigenSpace space);
std::string to_string(MomentRelation relation);

class DStabilityProblem {
 public:
  DStabilityProblem() = default;

  /// `eigen_space` nullopt selects Real when the matrix is symbolically
  /// symmetric and Complex otherwise. Requesting Real for a non-symmetric
  /// matrix throws unless `allow_real_nonsymmetric` is set.
  DStabilityProblem(UncertainMatrix matrix, SemialgebraicSet delta,
                    StabilityRegionComplement region,
                    std::vector<MomentConstraint> moment_constraints = {},
                    std::optional<EigenSpace> eigen_space = std::nullopt,
                    bool allow_real_nonsymmetric = false);

  const UncertainMatrix& matrix() const { return matrix_; }
  const SemialgebraicSet& delta() const { return delta_; }
  /// The region as supplied, over (lre, lim).
  const StabilityRegionComplement& region_complement() const { return region_; }
  /// The region restricted to the problem's eigen space.
  StabilityRegionComplement effective_region() const;
  EigenSpace eigen_space() const { return eigen_space_; }
  bool allow_real_nonsymmetric() const { return allow_real_nonsymmetric_; }

  /// User constraints only; the normalization E[1] = 1 is implicit.
  const std::vector<MomentConstraint>& user_moment_constraints() const {
    return user_constraints_;
  }
  /// Normalization first, then the user constraints.
  std::vector<MomentConstraint> moment_constraints() const;

  /// Only the support of the uncertainty is known.
  bool support_only() const { return user_constraints_.empty(); }

  DStabilityProblem with_moment_constraints(std::vector<MomentConstraint> constraints) const;
  DStabilityProblem with_delta(SemialgebraicSet delta) const;

  bool operator==(const DStabilityProblem&) const = default;

 private:
  UncertainMatrix matrix_;
  SemialgebraicSet delta_;
  StabilityRegionComplement region_;
  std::vector<MomentConstraint> user_constraints_;
  EigenSpace eigen_space_ = EigenSpace::Complex;
  bool allow_real_nonsymmetric_ = false;
};

struct LiftOptions {
  /// Intersect D^c with the disk of radius spectral_bound so that the lifted
  /// support set is compact.
  bool auto_compactify = true;
  /// Overrides spectral_bound, required when delta is not box-bounded.
  std::optional<double> lambda_radius;
};

struct LiftedMomentConstraint {
  Polynomial f;
  MomentRelation relation = MomentRelation::Equal;
  double target = 0.0;
};

/// The eigen-violation problem over the augmented variable z.
///
/// z is ordered (rho_1..rho_k, lre, [lim], x_1..x_n) in real mode and
/// (rho_1..rho_k, lre, lim, xre_1..xre_n, xim_1..xim_n) in complex mode.
struct LiftedProblem {
  std::vector<std::string> z_vars;
  SemialgebraicSet support;
  Polynomial objective;
  /// Normalization first.
  std::vector<LiftedMomentConstraint> moment_constraints;

  EigenSpace eigen_space = EigenSpace::Complex;
  std::size_t matrix_size = 0;
  std::size_t num_params = 0;
  /// Radius of the lambda disk added to the support; 0 when none was added.
  double lambda_radius = 0.0;
  /// Magnitude bound per coordinate, used to precondition the relaxation.
  std::vector<double> coordinate_scale;

  std::size_t num_vars() const { return z_vars.size(); }
  std::size_t rho_index(std::size_t k) const { return k; }
  std::size_t lambda_re_index() const { return num_params; }
  std::optional<std::size_t> lambda_im_index() const;
  std::size_t x_re_index(std::size_t i) const;
  std::optional<std::size_t> x_im_index(std::size_t i) const;

  /// Packs (rho, lambda, x) into a z vector.
  std::vector<double> make_point(std::span<const double> rho, double lambda_re,
                                 double lambda_im, std::span<const double> x_re,
                                 std::span<const double> x_im) const;
};

LiftedProblem build_lifted(const DStabilityProblem& problem, const LiftOptions& options = {});

/// Upper bound on every eigenvalue modulus of A(rho) over the bounding box of
/// delta: the largest row sum of interval bounds on |A_ij|.
double spectral_bound(const UncertainMatrix& matrix, const SemialgebraicSet& delta);

/// Smallest admissible relaxation order.
int minimal_order(const LiftedProblem& lifted);

}  // namespace dstab
