#include "dstab/sets.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace dstab {

SemialgebraicSet::SemialgebraicSet(std::vector<std::string> variables,
                                   std::vector<Constraint> constraints)
    : variables_(std::move(variables)) {
  for (auto& c : constraints) constraints_.push_back(std::move(c));
  for (const auto& c : constraints_) {
    if (c.poly.num_vars() != variables_.size()) {
      throw Error("constraint polynomial has " + std::to_string(c.poly.num_vars()) +
                  " variables, set has " + std::to_string(variables_.size()));
    }
  }
}

SemialgebraicSet SemialgebraicSet::with(Constraint c) const {
  auto cs = constraints_;
  cs.push_back(std::move(c));
  return SemialgebraicSet(variables_, std::move(cs));
}

SemialgebraicSet SemialgebraicSet::equalities_as_pairs() const {
  std::vector<Constraint> cs;
  for (const auto& c : constraints_) {
    if (c.relation == Relation::EqualZero) {
      cs.push_back({c.poly, Relation::GreaterEqualZero});
      cs.push_back({-c.poly, Relation::GreaterEqualZero});
    } else {
      cs.push_back(c);
    }
  }
  return SemialgebraicSet(variables_, std::move(cs));
}

bool contains(const SemialgebraicSet& set, std::span<const double> point, double tol) {
  if (point.size() != set.dimension()) {
    throw Error("contains: point dimension " + std::to_string(point.size()) +
                " does not match set dimension " + std::to_string(set.dimension()));
  }
  for (const auto& c : set.constraints()) {
    const double v = c.poly.evaluate(point);
    if (c.relation == Relation::GreaterEqualZero) {
      if (v < -tol) return false;
    } else if (std::abs(v) > tol) {
      return false;
    }
  }
  return true;
}

double membership_margin(const SemialgebraicSet& set, std::span<const double> point) {
  if (point.size() != set.dimension()) throw Error("membership_margin: dimension mismatch");
  double margin = std::numeric_limits<double>::infinity();
  for (const auto& c : set.constraints()) {
    const double v = c.poly.evaluate(point);
    margin = std::min(margin, c.relation == Relation::GreaterEqualZero ? v : -std::abs(v));
  }
  return margin;
}

SemialgebraicSet box_set(const std::vector<std::string>& variables,
                         std::span<const double> lower, std::span<const double> upper) {
  const std::size_t n = variables.size();
  if (lower.size() != n || upper.size() != n) throw Error("box_set: bound length mismatch");
  std::vector<Constraint> cs;
  for (std::size_t i = 0; i < n; ++i) {
    if (!(lower[i] <= upper[i])) {
      throw Error("box_set: inverted bounds for '" + variables[i] + "'");
    }
    const Polynomial v = Polynomial::variable(n, i);
    cs.push_back({v - lower[i], Relation::GreaterEqualZero});
    cs.push_back({-v + upper[i], Relation::GreaterEqualZero});
  }
  return SemialgebraicSet(variables, std::move(cs));
}

namespace {

// Matches a*v_i + b; returns the variable index or nullopt.
std::optional<std::size_t> univariate_affine(const Polynomial& p, double& a, double& b) {
  if (p.degree() != 1) return std::nullopt;
  std::optional<std::size_t> var;
  a = 0.0;
  b = 0.0;
  for (const auto& [alpha, c] : p.terms()) {
    const int d = total_degree(alpha);
    if (d == 0) {
      b = c;
      continue;
    }
    const auto i = static_cast<std::size_t>(
        std::find(alpha.begin(), alpha.end(), 1) - alpha.begin());
    if (var && *var != i) return std::nullopt;
    var = i;
    a = c;
  }
  return var;
}

}  // namespace

std::vector<std::optional<Interval>> axis_bounds(const SemialgebraicSet& set) {
  const std::size_t n = set.dimension();
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> lo(n, -inf), hi(n, inf);
  for (const auto& c : set.constraints()) {
    double a = 0, b = 0;
    auto var = univariate_affine(c.poly, a, b);
    if (!var) continue;
    const double root = -b / a;
    if (c.relation == Relation::EqualZero) {
      lo[*var] = std::max(lo[*var], root);
      hi[*var] = std::min(hi[*var], root);
    } else if (a > 0) {
      lo[*var] = std::max(lo[*var], root);
    } else {
      hi[*var] = std::min(hi[*var], root);
    }
  }
  std::vector<std::optional<Interval>> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (std::isfinite(lo[i]) && std::isfinite(hi[i])) out[i] = Interval{lo[i], hi[i]};
  }
  return out;
}

bool is_box(const SemialgebraicSet& set) {
  for (const auto& c : set.constraints()) {
    double a = 0, b = 0;
    if (!univariate_affine(c.poly, a, b)) return false;
  }
  const auto bounds = axis_bounds(set);
  return std::all_of(bounds.begin(), bounds.end(), [](const auto& b) { return b.has_value(); });
}

SemialgebraicSet compactify(const SemialgebraicSet& set, double radius) {
  if (!(radius > 0.0)) throw Error("compactify: radius must be positive");
  const std::size_t n = set.dimension();
  Polynomial ball = Polynomial::constant(n, radius * radius);
  for (std::size_t i = 0; i < n; ++i) {
    Exponent sq(n, 0);
    sq[i] = 2;
    ball = ball - Polynomial::monomial(sq);
  }
  return set.with(std::move(ball), Relation::GreaterEqualZero);
}

StabilityRegionComplement region_preset(RegionPreset preset) {
  const std::vector<std::string> vars{kLambdaRe, kLambdaIm};
  const Polynomial re = Polynomial::variable(2, 0);
  const Polynomial im = Polynomial::variable(2, 1);
  std::vector<Constraint> cs;
  switch (preset) {
    case RegionPreset::LeftHalfPlaneClosure:
      cs.push_back({re, Relation::GreaterEqualZero});
      break;
    case RegionPreset::UnitDiskExteriorClosure:
      cs.push_back({re * re + im * im - 1.0, Relation::GreaterEqualZero});
      break;
    case RegionPreset::ImaginaryAxis:
      cs.push_back({re, Relation::EqualZero});
      break;
    case RegionPreset::Origin:
      cs.push_back({re, Relation::EqualZero});
      cs.push_back({im, Relation::EqualZero});
      break;
  }
  return {SemialgebraicSet(vars, std::move(cs)), false};
}

StabilityRegionComplement custom_region(std::vector<Constraint> constraints) {
  return {SemialgebraicSet({kLambdaRe, kLambdaIm}, std::move(constraints)), false};
}

StabilityRegionComplement restrict_to_real(const StabilityRegionComplement& region) {
  if (region.real_spectrum_only) return region;
  const auto& vars = region.set.variables();
  if (vars.size() != 2) throw Error("region must be defined over (lre, lim)");
  std::vector<Constraint> cs;
  for (const auto& c : region.set.constraints()) {
    Polynomial::TermMap terms;
    for (const auto& [alpha, coef] : c.poly.terms()) {
      if (alpha[1] != 0) continue;  // lim = 0
      terms[Exponent{alpha[0]}] += coef;
    }
    Polynomial p(1, std::move(terms));
    if (p.is_constant()) {
      const double v = p.evaluate(std::vector<double>{0.0});
      const bool trivially_true =
          c.relation == Relation::GreaterEqualZero ? v >= 0.0 : v == 0.0;
      if (trivially_true) continue;
    }
    cs.push_back({std::move(p), c.relation});
  }
  return {SemialgebraicSet({kLambdaRe}, std::move(cs)), true};
}

std::string to_string(RegionPreset preset) {
  switch (preset) {
    case RegionPreset::LeftHalfPlaneClosure:
      return "left_half_plane_closure";
    case RegionPreset::UnitDiskExteriorClosure:
      return "unit_disk_exterior_closure";
    case RegionPreset::ImaginaryAxis:
      return "imaginary_axis";
    case RegionPreset::Origin:
      return "origin";
  }
  return "unknown";
}

std::optional<RegionPreset> parse_region_preset(const std::string& name) {
  for (auto p : {RegionPreset::LeftHalfPlaneClosure, RegionPreset::UnitDiskExteriorClosure,
                 RegionPreset::ImaginaryAxis, RegionPreset::Origin}) {
    if (to_string(p) == name) return p;
  }
  return std::nullopt;
}

}  // namespace dstab
