#pragma once

// Small problems shared by the unit suites.

#include <optional>
#include <string>
#include <vector>

#include "dstab/poly.hpp"
#include "dstab/problem.hpp"
#include "dstab/sets.hpp"

namespace fixtures {

using namespace dstab;

inline Polynomial rho_poly(const std::string& text) { return parse_polynomial(text, {"rho"}); }

inline SemialgebraicSet interval(double lo, double hi, const std::string& name = "rho") {
  const std::vector<double> l = {lo}, h = {hi};
  return box_set({name}, l, h);
}

/// diag(rho - 1, -1) over [lo, hi] with D^c = {lre >= 0}.
inline DStabilityProblem running_example(std::optional<double> mean = std::nullopt,
                                         double lo = 0.0, double hi = 1.0) {
  UncertainMatrix a({"rho"}, 2, {rho_poly("rho - 1"), rho_poly("0"), rho_poly("0"),
                                 rho_poly("-1")});
  std::vector<MomentConstraint> m;
  if (mean) m.push_back({rho_poly("rho"), MomentRelation::Equal, *mean});
  return DStabilityProblem(std::move(a), interval(lo, hi),
                           region_preset(RegionPreset::LeftHalfPlaneClosure), std::move(m));
}

/// The quadratic 2x2 Hurwitz example over [-0.1, 3.4].
inline DStabilityProblem hurwitz() {
  UncertainMatrix a({"rho"}, 2, {rho_poly("-2.4 - rho^2"), rho_poly("6 - rho^2"),
                                 rho_poly("1 - 2*rho^2"), rho_poly("-2.9 - 2*rho")});
  return DStabilityProblem(std::move(a), interval(-0.1, 3.4),
                           region_preset(RegionPreset::LeftHalfPlaneClosure), {},
                           EigenSpace::Complex);
}

/// Symmetric 2x2 matrix [[a0 + a1 rho, b0 + b1 rho], [., c0 + c1 rho]] on [-1, 1].
inline DStabilityProblem symmetric_2x2(const std::vector<double>& c) {
  auto lin = [](double k0, double k1) {
    return Polynomial::constant(1, k0) + Polynomial::variable(1, 0) * k1;
  };
  const auto off = lin(c[2], c[3]);
  UncertainMatrix a({"rho"}, 2, {lin(c[0], c[1]), off, off, lin(c[4], c[5])});
  return DStabilityProblem(std::move(a), interval(-1.0, 1.0),
                           region_preset(RegionPreset::LeftHalfPlaneClosure));
}

}  // namespace fixtures
