#include "dstab/poly.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <numeric>

namespace dstab {

int total_degree(const Exponent& alpha) {
  return std::accumulate(alpha.begin(), alpha.end(), 0);
}

bool graded_lex_less(const Exponent& a, const Exponent& b) {
  const int da = total_degree(a);
  const int db = total_degree(b);
  if (da != db) return da < db;
  // Same degree: the vector with the larger leading exponent comes first.
  return std::lexicographical_compare(b.begin(), b.end(), a.begin(), a.end());
}

std::size_t ExponentHash::operator()(const Exponent& alpha) const noexcept {
  std::size_t h = 0xcbf29ce484222325ULL;
  for (int e : alpha) {
    h ^= static_cast<std::size_t>(e) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  }
  return h;
}

Exponent add_exponents(const Exponent& a, const Exponent& b) {
  if (a.size() != b.size()) throw Error("exponent length mismatch");
  Exponent out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] + b[i];
  return out;
}

Polynomial::Polynomial(std::size_t num_vars, TermMap terms) : num_vars_(num_vars) {
  for (auto& [alpha, c] : terms) {
    if (alpha.size() != num_vars) throw Error("term exponent has wrong length");
    for (int e : alpha) {
      if (e < 0) throw Error("negative exponent in polynomial term");
    }
    if (c != 0.0) terms_.emplace(alpha, c);
  }
}

Polynomial Polynomial::constant(std::size_t num_vars, double value) {
  TermMap t;
  t.emplace(Exponent(num_vars, 0), value);
  return Polynomial(num_vars, std::move(t));
}

Polynomial Polynomial::variable(std::size_t num_vars, std::size_t index) {
  if (index >= num_vars) throw Error("variable index out of range");
  Exponent alpha(num_vars, 0);
  alpha[index] = 1;
  TermMap t;
  t.emplace(std::move(alpha), 1.0);
  return Polynomial(num_vars, std::move(t));
}

Polynomial Polynomial::monomial(Exponent alpha, double coefficient) {
  const std::size_t n = alpha.size();
  TermMap t;
  t.emplace(std::move(alpha), coefficient);
  return Polynomial(n, std::move(t));
}

bool Polynomial::is_constant() const {
  return degree() == 0;
}

int Polynomial::degree() const {
  // Terms are sorted by degree, so the last one is of maximal degree.
  if (terms_.empty()) return 0;
  return total_degree(terms_.rbegin()->first);
}

double Polynomial::coefficient(const Exponent& alpha) const {
  auto it = terms_.find(alpha);
  return it == terms_.end() ? 0.0 : it->second;
}

double Polynomial::evaluate(std::span<const double> point) const {
  if (point.size() != num_vars_) {
    throw Error("evaluate: point has " + std::to_string(point.size()) +
                " coordinates, polynomial has " + std::to_string(num_vars_) +
                " variables");
  }
  double sum = 0.0;
  for (const auto& [alpha, c] : terms_) {
    double mono = c;
    for (std::size_t i = 0; i < num_vars_; ++i) {
      for (int k = 0; k < alpha[i]; ++k) mono *= point[i];
    }
    sum += mono;
  }
  return sum;
}

void Polynomial::check_same_vars(const Polynomial& other) const {
  if (num_vars_ != other.num_vars_) {
    throw Error("polynomial variable-count mismatch: " + std::to_string(num_vars_) +
                " vs " + std::to_string(other.num_vars_));
  }
}

Polynomial Polynomial::operator-() const {
  Polynomial out(num_vars_);
  for (const auto& [alpha, c] : terms_) out.terms_.emplace(alpha, -c);
  return out;
}

Polynomial Polynomial::operator+(const Polynomial& other) const {
  check_same_vars(other);
  Polynomial out = *this;
  for (const auto& [alpha, c] : other.terms_) {
    auto [it, inserted] = out.terms_.emplace(alpha, c);
    if (!inserted) {
      it->second += c;
      if (it->second == 0.0) out.terms_.erase(it);
    }
  }
  return out;
}

Polynomial Polynomial::operator-(const Polynomial& other) const {
  return *this + (-other);
}

Polynomial Polynomial::operator*(const Polynomial& other) const {
  check_same_vars(other);
  TermMap acc;
  for (const auto& [a, ca] : terms_) {
    for (const auto& [b, cb] : other.terms_) {
      acc[add_exponents(a, b)] += ca * cb;
    }
  }
  return Polynomial(num_vars_, std::move(acc));
}

Polynomial Polynomial::operator*(double factor) const {
  Polynomial out(num_vars_);
  if (factor == 0.0) return out;
  for (const auto& [alpha, c] : terms_) {
    const double v = c * factor;
    if (v != 0.0) out.terms_.emplace(alpha, v);
  }
  return out;
}

Polynomial Polynomial::operator+(double value) const {
  return *this + constant(num_vars_, value);
}

Polynomial Polynomial::operator-(double value) const {
  return *this + constant(num_vars_, -value);
}

Polynomial Polynomial::pow(int exponent) const {
  if (exponent < 0) throw Error("negative polynomial power");
  Polynomial result = constant(num_vars_, 1.0);
  Polynomial base = *this;
  while (exponent > 0) {
    if (exponent & 1) result = result * base;
    exponent >>= 1;
    if (exponent > 0) base = base * base;
  }
  return result;
}

Polynomial Polynomial::pruned(double eps) const {
  if (eps <= 0.0) return *this;
  Polynomial out(num_vars_);
  for (const auto& [alpha, c] : terms_) {
    if (std::abs(c) > eps) out.terms_.emplace(alpha, c);
  }
  return out;
}

Polynomial Polynomial::substitute_affine(std::span<const double> shift,
                                         std::span<const double> scale) const {
  if (shift.size() != num_vars_ || scale.size() != num_vars_) {
    throw Error("substitute_affine: dimension mismatch");
  }
  // Powers of each affine factor are shared between terms.
  std::vector<std::vector<Polynomial>> powers(num_vars_);
  auto factor_power = [&](std::size_t i, int k) -> const Polynomial& {
    auto& cache = powers[i];
    if (cache.empty()) cache.push_back(constant(num_vars_, 1.0));
    while (static_cast<int>(cache.size()) <= k) {
      Polynomial lin = variable(num_vars_, i) * scale[i] + shift[i];
      cache.push_back(cache.back() * lin);
    }
    return cache[k];
  };

  TermMap acc;
  for (const auto& [alpha, c] : terms_) {
    Polynomial term = constant(num_vars_, c);
    for (std::size_t i = 0; i < num_vars_; ++i) {
      if (alpha[i] > 0) term = term * factor_power(i, alpha[i]);
    }
    for (const auto& [beta, cb] : term.terms()) acc[beta] += cb;
  }
  return Polynomial(num_vars_, std::move(acc));
}

namespace {

std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  std::string s(buf);
  // Shortest representation that still round-trips.
  for (int prec = 1; prec < 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, v);
    if (std::strtod(buf, nullptr) == v) {
      s = buf;
      break;
    }
  }
  return s;
}

}  // namespace

std::string Polynomial::to_string(const std::vector<std::string>& names) const {
  if (names.size() != num_vars_) throw Error("to_string: wrong number of names");
  if (terms_.empty()) return "0";
  std::string out;
  bool first = true;
  for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
    const auto& [alpha, c] = *it;
    const double mag = std::abs(c);
    if (first) {
      if (c < 0) out += "-";
    } else {
      out += c < 0 ? " - " : " + ";
    }
    first = false;
    std::string mono;
    for (std::size_t i = 0; i < num_vars_; ++i) {
      if (alpha[i] == 0) continue;
      if (!mono.empty()) mono += "*";
      mono += names[i];
      if (alpha[i] > 1) mono += "^" + std::to_string(alpha[i]);
    }
    if (mono.empty()) {
      out += format_number(mag);
    } else if (mag == 1.0) {
      out += mono;
    } else {
      out += format_number(mag) + "*" + mono;
    }
  }
  return out;
}

Polynomial embed(const Polynomial& p, const std::vector<std::string>& source_vars,
                 const std::vector<std::string>& target_vars) {
  if (source_vars.size() != p.num_vars()) {
    throw Error("embed: source variable list does not match polynomial");
  }
  std::vector<std::size_t> where(source_vars.size());
  for (std::size_t i = 0; i < source_vars.size(); ++i) {
    auto it = std::find(target_vars.begin(), target_vars.end(), source_vars[i]);
    if (it == target_vars.end()) {
      throw Error("embed: variable '" + source_vars[i] + "' missing from target list");
    }
    where[i] = static_cast<std::size_t>(it - target_vars.begin());
  }
  Polynomial::TermMap terms;
  for (const auto& [alpha, c] : p.terms()) {
    Exponent beta(target_vars.size(), 0);
    for (std::size_t i = 0; i < alpha.size(); ++i) beta[where[i]] += alpha[i];
    terms[beta] += c;
  }
  return Polynomial(target_vars.size(), std::move(terms));
}

std::size_t binomial(std::size_t n, std::size_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  std::size_t r = 1;
  for (std::size_t i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

namespace {

void enumerate_degree(std::size_t num_vars, int degree, std::size_t pos, Exponent& cur,
                      std::vector<Exponent>& out) {
  if (pos + 1 == num_vars) {
    cur[pos] = degree;
    out.push_back(cur);
    return;
  }
  for (int e = degree; e >= 0; --e) {
    cur[pos] = e;
    enumerate_degree(num_vars, degree - e, pos + 1, cur, out);
  }
  cur[pos] = 0;
}

}  // namespace

MonomialBasis::MonomialBasis(std::size_t num_vars, int order)
    : num_vars_(num_vars), order_(order) {
  if (order < 0) throw Error("monomial basis order must be non-negative");
  if (num_vars == 0) {
    elements_.emplace_back();
  } else {
    elements_.reserve(binomial(num_vars + order, static_cast<std::size_t>(order)));
    Exponent cur(num_vars, 0);
    for (int d = 0; d <= order; ++d) enumerate_degree(num_vars, d, 0, cur, elements_);
  }
  lookup_.reserve(elements_.size());
  for (std::size_t i = 0; i < elements_.size(); ++i) lookup_.emplace(elements_[i], i);
}

std::size_t MonomialBasis::index(const Exponent& alpha) const {
  auto it = lookup_.find(alpha);
  if (it == lookup_.end()) {
    throw Error("exponent of degree " + std::to_string(total_degree(alpha)) +
                " is outside the monomial basis of order " + std::to_string(order_));
  }
  return it->second;
}

bool MonomialBasis::contains(const Exponent& alpha) const {
  return lookup_.count(alpha) != 0;
}

MonomialBasis monomial_basis(std::size_t num_vars, int order) {
  if (num_vars == 0) throw Error("monomial basis needs at least one variable");
  return MonomialBasis(num_vars, order);
}

std::size_t basis_index(const MonomialBasis& basis, const Exponent& alpha) {
  if (alpha.size() != basis.num_vars()) throw Error("exponent length mismatch");
  return basis.index(alpha);
}

}  // namespace dstab
