#pragma once

// Sparse multivariate real polynomials over a fixed, ordered variable list.
//
// Monomials are ordered graded-lexicographically with the first variable
// heaviest, so the degree-one monomials of b(z) come out as z1, z2, ..., zn
// and the degree-two block starts with z1^2, z1 z2, ...

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "dstab/error.hpp"

namespace dstab {

/// Exponent vector alpha; entry i is the power of variable i.
using Exponent = std::vector<int>;

int total_degree(const Exponent& alpha);

/// Graded order: lower total degree first, ties broken by descending
/// lexicographic order (z1 > z2 > ... > zn).
bool graded_lex_less(const Exponent& a, const Exponent& b);

struct GradedLexLess {
  bool operator()(const Exponent& a, const Exponent& b) const {
    return graded_lex_less(a, b);
  }
};

struct ExponentHash {
  std::size_t operator()(const Exponent& alpha) const noexcept;
};

Exponent add_exponents(const Exponent& a, const Exponent& b);

class Polynomial {
 public:
  using TermMap = std::map<Exponent, double, GradedLexLess>;

  /// The zero polynomial in `num_vars` variables.
  explicit Polynomial(std::size_t num_vars = 0) : num_vars_(num_vars) {}

  /// Builds a polynomial from raw terms; zero coefficients are dropped and
  /// every key must have length `num_vars`.
  Polynomial(std::size_t num_vars, TermMap terms);

  static Polynomial constant(std::size_t num_vars, double value);
  static Polynomial variable(std::size_t num_vars, std::size_t index);
  static Polynomial monomial(Exponent alpha, double coefficient = 1.0);

  std::size_t num_vars() const { return num_vars_; }
  const TermMap& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  bool is_constant() const;
  /// Maximum total degree over the stored terms; 0 for the zero polynomial.
  int degree() const;
  double coefficient(const Exponent& alpha) const;

  double evaluate(std::span<const double> point) const;

  Polynomial operator-() const;
  Polynomial operator+(const Polynomial& other) const;
  Polynomial operator-(const Polynomial& other) const;
  Polynomial operator*(const Polynomial& other) const;
  Polynomial operator*(double factor) const;
  Polynomial operator+(double value) const;
  Polynomial operator-(double value) const;
  Polynomial pow(int exponent) const;

  /// Drops every coefficient with |c| <= eps. eps = 0 is the identity.
  Polynomial pruned(double eps) const;

  /// Substitutes z_i -> shift[i] + scale[i] * z_i.
  Polynomial substitute_affine(std::span<const double> shift,
                               std::span<const double> scale) const;

  /// Human-readable form that parse_polynomial reads back term for term.
  std::string to_string(const std::vector<std::string>& names) const;

  bool operator==(const Polynomial& other) const = default;

 private:
  void check_same_vars(const Polynomial& other) const;

  std::size_t num_vars_ = 0;
  TermMap terms_;
};

inline Polynomial operator*(double factor, const Polynomial& p) {
  return p * factor;
}

/// Re-expresses p, written over `source_vars`, as a polynomial over
/// `target_vars`. Every source variable must occur in the target list.
Polynomial embed(const Polynomial& p, const std::vector<std::string>& source_vars,
                 const std::vector<std::string>& target_vars);

/// Parses an expression over the given variables.
///
///   expr   := ['-'] term (('+'|'-') term)*
///   term   := factor ('*' factor)*
///   factor := base ('^' nonneg-int)?
///   base   := number | identifier | '(' expr ')'
Polynomial parse_polynomial(const std::string& text,
                            const std::vector<std::string>& variables);

/// Graded-lex ordered monomials of total degree <= order.
class MonomialBasis {
 public:
  MonomialBasis() = default;
  MonomialBasis(std::size_t num_vars, int order);

  std::size_t num_vars() const { return num_vars_; }
  int order() const { return order_; }
  std::size_t size() const { return elements_.size(); }
  const std::vector<Exponent>& elements() const { return elements_; }
  const Exponent& operator[](std::size_t i) const { return elements_[i]; }

  /// Position of alpha; throws when |alpha| exceeds the order.
  std::size_t index(const Exponent& alpha) const;
  bool contains(const Exponent& alpha) const;

 private:
  std::size_t num_vars_ = 0;
  int order_ = 0;
  std::vector<Exponent> elements_;
  std::unordered_map<Exponent, std::size_t, ExponentHash> lookup_;
};

MonomialBasis monomial_basis(std::size_t num_vars, int order);
std::size_t basis_index(const MonomialBasis& basis, const Exponent& alpha);

/// binomial(n, k) in exact integer arithmetic.
std::size_t binomial(std::size_t n, std::size_t k);

}  // namespace dstab
