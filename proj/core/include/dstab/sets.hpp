#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dstab/poly.hpp"

namespace dstab {

enum class Relation { GreaterEqualZero, EqualZero };

struct Constraint {
  Polynomial poly;
  Relation relation = Relation::GreaterEqualZero;

  bool operator==(const Constraint&) const = default;
};

/// Default membership tolerance used by the oracles.
inline constexpr double kMembershipTolerance = 1e-8;

/// Conjunction of polynomial relations over named variables. An empty
/// constraint list describes the whole space.
class SemialgebraicSet {
 public:
  SemialgebraicSet() = default;
  explicit SemialgebraicSet(std::vector<std::string> variables)
      : variables_(std::move(variables)) {}
  SemialgebraicSet(std::vector<std::string> variables, std::vector<Constraint> constraints);

  const std::vector<std::string>& variables() const { return variables_; }
  std::size_t dimension() const { return variables_.size(); }
  const std::vector<Constraint>& constraints() const { return constraints_; }

  SemialgebraicSet with(Constraint c) const;
  SemialgebraicSet with(Polynomial p, Relation r) const { return with(Constraint{std::move(p), r}); }

  /// Every equality p = 0 rewritten as the pair p >= 0, -p >= 0.
  SemialgebraicSet equalities_as_pairs() const;

  bool operator==(const SemialgebraicSet&) const = default;

 private:
  std::vector<std::string> variables_;
  std::vector<Constraint> constraints_;
};

/// True iff every >= constraint is >= -tol and every = constraint has
/// magnitude <= tol at the point.
bool contains(const SemialgebraicSet& set, std::span<const double> point,
              double tol = kMembershipTolerance);

/// Signed depth of the point inside the set: the minimum over constraints of
/// p(z) for inequalities and -|p(z)| for equalities. Non-negative iff the
/// point is a member at tolerance zero.
double membership_margin(const SemialgebraicSet& set, std::span<const double> point);

/// Axis-aligned box as 2n linear constraints lo_i <= v_i <= hi_i.
SemialgebraicSet box_set(const std::vector<std::string>& variables,
                         std::span<const double> lower, std::span<const double> upper);

struct Interval {
  double lo;
  double hi;
};

/// Per-variable bounds read off univariate affine constraints
/// (a*v + b >= 0 and a*v + b = 0). Entries stay nullopt for variables that
/// are not bounded on both sides this way.
std::vector<std::optional<Interval>> axis_bounds(const SemialgebraicSet& set);

/// True when the set is exactly a box: only univariate affine constraints and
/// every variable bounded on both sides.
bool is_box(const SemialgebraicSet& set);

/// Adds the ball constraint radius^2 - sum z_i^2 >= 0.
SemialgebraicSet compactify(const SemialgebraicSet& set, double radius);

// ---------------------------------------------------------------------------
// Instability regions D^c in the (lre, lim) plane.

inline const std::string kLambdaRe = "lre";
inline const std::string kLambdaIm = "lim";

enum class RegionPreset {
  LeftHalfPlaneClosure,     // complement of the open left half plane: lre >= 0
  UnitDiskExteriorClosure,  // lre^2 + lim^2 - 1 >= 0
  ImaginaryAxis,            // lre = 0
  Origin,                   // lre = 0, lim = 0
};

struct StabilityRegionComplement {
  /// Variables are [lre, lim], or just [lre] when real_spectrum_only.
  SemialgebraicSet set;
  bool real_spectrum_only = false;

  bool operator==(const StabilityRegionComplement&) const = default;
};

StabilityRegionComplement region_preset(RegionPreset preset);

/// Builds a region from constraints over (lre, lim).
StabilityRegionComplement custom_region(std::vector<Constraint> constraints);

/// Restriction to real eigenvalues: substitutes lim = 0 and drops the
/// variable. Constraints that become identically satisfied are removed.
StabilityRegionComplement restrict_to_real(const StabilityRegionComplement& region);

std::string to_string(RegionPreset preset);
std::optional<RegionPreset> parse_region_preset(const std::string& name);

}  // namespace dstab
