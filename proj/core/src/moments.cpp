#include "dstab/moments.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

namespace dstab {

MomentVector::MomentVector(std::shared_ptr<const MonomialBasis> basis, Eigen::VectorXd values)
    : basis_(std::move(basis)), values_(std::move(values)) {
  if (!basis_) throw Error("moment vector needs a basis");
  if (static_cast<std::size_t>(values_.size()) != basis_->size()) {
    throw Error("moment vector length " + std::to_string(values_.size()) +
                " does not match basis size " + std::to_string(basis_->size()));
  }
}

MomentVector::MomentVector(std::size_t num_vars, int degree)
    : basis_(std::make_shared<const MonomialBasis>(num_vars, degree)),
      values_(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(basis_->size()))) {}

double MomentVector::integrate(const Polynomial& p) const {
  if (p.num_vars() != num_vars()) throw Error("integrate: variable-count mismatch");
  double sum = 0.0;
  for (const auto& [alpha, c] : p.terms()) {
    if (total_degree(alpha) > degree()) {
      throw Error("integrate: polynomial degree exceeds moment order");
    }
    sum += c * (*this)(alpha);
  }
  return sum;
}

MomentVector MomentVector::truncated(int new_degree) const {
  if (new_degree > degree()) throw Error("cannot extend a moment vector by truncation");
  auto b = std::make_shared<const MonomialBasis>(num_vars(), new_degree);
  // Graded order makes the lower-degree moments a prefix.
  return MomentVector(b, values_.head(static_cast<Eigen::Index>(b->size())));
}

LinearMatrixForm::LinearMatrixForm(std::size_t dimension, std::vector<FormTerm> terms)
    : dimension_(dimension), terms_(std::move(terms)) {
  for (auto& t : terms_) {
    for (auto& e : t.entries) {
      if (e.row > e.col) std::swap(e.row, e.col);
      if (e.col >= dimension_) throw Error("form entry outside matrix dimension");
    }
  }
}

int LinearMatrixForm::max_degree() const {
  int d = 0;
  for (const auto& t : terms_) d = std::max(d, total_degree(t.alpha));
  return d;
}

Eigen::MatrixXd LinearMatrixForm::coefficient(const Exponent& alpha) const {
  const auto n = static_cast<Eigen::Index>(dimension_);
  Eigen::MatrixXd b = Eigen::MatrixXd::Zero(n, n);
  for (const auto& t : terms_) {
    if (t.alpha != alpha) continue;
    for (const auto& e : t.entries) {
      b(e.row, e.col) += e.value;
      if (e.row != e.col) b(e.col, e.row) += e.value;
    }
  }
  return b;
}

LinearMatrixForm LinearMatrixForm::negated() const {
  auto terms = terms_;
  for (auto& t : terms) {
    for (auto& e : t.entries) e.value = -e.value;
  }
  return LinearMatrixForm(dimension_, std::move(terms));
}

LinearMatrixForm localizing_matrix_form(const Polynomial& q, std::size_t num_vars, int tau) {
  if (q.num_vars() != num_vars) throw Error("localizing form: variable-count mismatch");
  if (tau < 0) throw Error("localizing form: negative order");
  const MonomialBasis basis(num_vars, tau);
  std::map<Exponent, std::vector<MatrixEntry>, GradedLexLess> by_alpha;
  for (std::size_t i = 0; i < basis.size(); ++i) {
    for (std::size_t j = i; j < basis.size(); ++j) {
      const Exponent ij = add_exponents(basis[i], basis[j]);
      for (const auto& [gamma, c] : q.terms()) {
        by_alpha[add_exponents(ij, gamma)].push_back({i, j, c});
      }
    }
  }
  std::vector<FormTerm> terms;
  terms.reserve(by_alpha.size());
  for (auto& [alpha, entries] : by_alpha) terms.push_back({alpha, std::move(entries)});
  return LinearMatrixForm(basis.size(), std::move(terms));
}

LinearMatrixForm moment_matrix_form(std::size_t num_vars, int tau) {
  return localizing_matrix_form(Polynomial::constant(num_vars, 1.0), num_vars, tau);
}

Eigen::MatrixXd assemble(const LinearMatrixForm& form, const MomentVector& m) {
  const auto n = static_cast<Eigen::Index>(form.dimension());
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n, n);
  for (const auto& t : form.terms()) {
    if (total_degree(t.alpha) > m.degree()) {
      throw Error("assemble: moment order " + std::to_string(m.degree()) +
                  " too low for a form of degree " + std::to_string(total_degree(t.alpha)));
    }
    const double v = m(t.alpha);
    for (const auto& e : t.entries) {
      out(e.row, e.col) += e.value * v;
      if (e.row != e.col) out(e.col, e.row) += e.value * v;
    }
  }
  return out;
}

MomentVector moments_of_atomic(const std::vector<std::vector<double>>& atoms,
                               std::span<const double> weights, std::size_t num_vars, int tau) {
  if (atoms.size() != weights.size()) throw Error("atoms and weights differ in length");
  double total = 0.0;
  for (double w : weights) {
    if (w < 0.0) throw Error("atomic measure has a negative weight");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-12) throw Error("atomic weights must sum to one");
  MomentVector m(num_vars, 2 * tau);
  Eigen::VectorXd values = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(m.size()));
  const auto& basis = m.basis();
  for (std::size_t k = 0; k < atoms.size(); ++k) {
    if (atoms[k].size() != num_vars) throw Error("atom dimension mismatch");
    for (std::size_t a = 0; a < basis.size(); ++a) {
      double mono = weights[k];
      const Exponent& alpha = basis[a];
      for (std::size_t i = 0; i < num_vars; ++i) {
        for (int e = 0; e < alpha[i]; ++e) mono *= atoms[k][i];
      }
      values[static_cast<Eigen::Index>(a)] += mono;
    }
  }
  return MomentVector(m.shared_basis(), std::move(values));
}

namespace {

std::string cache_key(const Polynomial& q, int tau) {
  std::ostringstream os;
  os.precision(17);
  os << q.num_vars() << '|' << tau;
  for (const auto& [alpha, c] : q.terms()) {
    os << '|';
    for (int e : alpha) os << e << ',';
    os << ':' << c;
  }
  return os.str();
}

}  // namespace

std::shared_ptr<const LinearMatrixForm> FormCache::localizing(const Polynomial& q, int tau) {
  const std::string key = cache_key(q, tau);
  {
    std::shared_lock lock(mutex_);
    auto it = forms_.find(key);
    if (it != forms_.end()) return it->second;
  }
  auto form = std::make_shared<const LinearMatrixForm>(
      localizing_matrix_form(q, q.num_vars(), tau));
  std::unique_lock lock(mutex_);
  auto [it, inserted] = forms_.emplace(key, std::move(form));
  return it->second;
}

std::size_t FormCache::size() const {
  std::shared_lock lock(mutex_);
  return forms_.size();
}

}  // namespace dstab
