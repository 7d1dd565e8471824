#pragma once

// Moment vectors and the moment/localizing matrices as linear pencils in m.

#include <memory>
#include <mutex>
#include <shared_mutex>
#include <span>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

#include "dstab/poly.hpp"

namespace dstab {

/// Truncated moment sequence m_alpha, |alpha| <= degree, in graded-lex order.
class MomentVector {
 public:
  MomentVector() = default;
  MomentVector(std::shared_ptr<const MonomialBasis> basis, Eigen::VectorXd values);
  MomentVector(std::size_t num_vars, int degree);

  std::size_t num_vars() const { return basis_->num_vars(); }
  /// Highest moment degree stored (2*tau for a relaxation of order tau).
  int degree() const { return basis_->order(); }
  std::size_t size() const { return static_cast<std::size_t>(values_.size()); }
  const MonomialBasis& basis() const { return *basis_; }
  const std::shared_ptr<const MonomialBasis>& shared_basis() const { return basis_; }
  const Eigen::VectorXd& values() const { return values_; }

  double operator()(const Exponent& alpha) const { return values_[basis_->index(alpha)]; }
  double mass() const { return values_[0]; }

  /// L_m(p) = sum_alpha p_alpha m_alpha.
  double integrate(const Polynomial& p) const;

  /// Moments of degree <= new_degree.
  MomentVector truncated(int new_degree) const;

 private:
  std::shared_ptr<const MonomialBasis> basis_;
  Eigen::VectorXd values_;
};

/// One nonzero of a symmetric coefficient matrix; stored with row <= col.
struct MatrixEntry {
  std::size_t row;
  std::size_t col;
  double value;
};

struct FormTerm {
  Exponent alpha;
  std::vector<MatrixEntry> entries;
};

/// sum_alpha B_alpha m_alpha with sparse symmetric B_alpha.
class LinearMatrixForm {
 public:
  LinearMatrixForm() = default;
  LinearMatrixForm(std::size_t dimension, std::vector<FormTerm> terms);

  std::size_t dimension() const { return dimension_; }
  const std::vector<FormTerm>& terms() const { return terms_; }
  /// Largest |alpha| appearing in the form.
  int max_degree() const;
  Eigen::MatrixXd coefficient(const Exponent& alpha) const;
  LinearMatrixForm negated() const;

 private:
  std::size_t dimension_ = 0;
  std::vector<FormTerm> terms_;
};

/// M_tau(m): entry (i,j) is m_{alpha_i + alpha_j} over the basis b_tau.
LinearMatrixForm moment_matrix_form(std::size_t num_vars, int tau);

/// M_tau(q m): entry (i,j) is sum_gamma q_gamma m_{alpha_i + alpha_j + gamma}.
LinearMatrixForm localizing_matrix_form(const Polynomial& q, std::size_t num_vars, int tau);

/// Evaluates the pencil at m.
Eigen::MatrixXd assemble(const LinearMatrixForm& form, const MomentVector& m);

/// m_alpha = sum_k w_k atom_k^alpha for |alpha| <= 2*tau.
MomentVector moments_of_atomic(const std::vector<std::vector<double>>& atoms,
                               std::span<const double> weights, std::size_t num_vars, int tau);

/// Memoizes localizing forms keyed on (q, order). Lookups take a shared lock,
/// insertions an exclusive one.
class FormCache {
 public:
  std::shared_ptr<const LinearMatrixForm> localizing(const Polynomial& q, int tau);
  std::size_t size() const;

 private:
  mutable std::shared_mutex mutex_;
  std::unordered_map<std::string, std::shared_ptr<const LinearMatrixForm>> forms_;
};

}  // namespace dstab
