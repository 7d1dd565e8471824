#include "dstab/oracle.hpp"

#include <cmath>
#include <limits>
#include <random>

#include "dstab/error.hpp"
#include "dstab/simplex.hpp"

namespace dstab {

namespace {

double region_margin(const StabilityRegionComplement& region, std::complex<double> lambda,
                     double tol, bool& inside) {
  if (region.real_spectrum_only) {
    if (std::abs(lambda.imag()) > tol) {
      inside = false;
      return -std::numeric_limits<double>::infinity();
    }
    const double re[1] = {lambda.real()};
    inside = contains(region.set, re, tol);
    return membership_margin(region.set, re);
  }
  const double z[2] = {lambda.real(), lambda.imag()};
  inside = contains(region.set, z, tol);
  return membership_margin(region.set, z);
}

std::vector<Interval> bounding_box(const SemialgebraicSet& delta) {
  std::vector<Interval> box;
  const auto bounds = axis_bounds(delta);
  for (std::size_t k = 0; k < bounds.size(); ++k) {
    if (!bounds[k]) {
      throw Error("oracle: variable " + delta.variables()[k] + " has no finite bounds");
    }
    box.push_back(*bounds[k]);
  }
  return box;
}

}  // namespace

std::optional<ViolationWitness> violation_at(const DStabilityProblem& problem,
                                             std::span<const double> rho, double tol) {
  const Eigen::MatrixXd a = problem.matrix().evaluate(rho);
  std::optional<ViolationWitness> best;
  for (const auto& pair : eigenpairs(a)) {
    bool inside = false;
    const double margin = region_margin(problem.region_complement(), pair.value, tol, inside);
    if (!inside) continue;
    if (!best || margin > best->min_region_residual) {
      best = ViolationWitness{{rho.begin(), rho.end()}, pair.value, margin, pair.residual};
    }
  }
  return best;
}

std::vector<std::vector<double>> sample_delta(const SemialgebraicSet& delta, int points_per_axis,
                                              std::uint64_t seed) {
  if (points_per_axis < 1) throw Error("sample_delta: need at least one point per axis");
  const auto box = bounding_box(delta);
  const std::size_t k = box.size();
  std::size_t total = 1;
  for (std::size_t i = 0; i < k; ++i) {
    total *= static_cast<std::size_t>(points_per_axis);
    if (total > 50'000'000) throw Error("sample_delta: grid too large");
  }
  std::vector<std::vector<double>> out;
  auto axis_point = [&](std::size_t axis, int j) {
    if (points_per_axis == 1) return 0.5 * (box[axis].lo + box[axis].hi);
    const double f = static_cast<double>(j) / static_cast<double>(points_per_axis - 1);
    return box[axis].lo + f * (box[axis].hi - box[axis].lo);
  };
  if (is_box(delta)) {
    out.reserve(total);
    std::vector<int> idx(k, 0);
    for (std::size_t n = 0; n < total; ++n) {
      std::vector<double> p(k);
      for (std::size_t i = 0; i < k; ++i) p[i] = axis_point(i, idx[i]);
      out.push_back(std::move(p));
      for (std::size_t i = k; i-- > 0;) {
        if (++idx[i] < points_per_axis) break;
        idx[i] = 0;
      }
    }
    return out;
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (std::size_t n = 0; n < total; ++n) {
    std::vector<double> p(k);
    for (std::size_t i = 0; i < k; ++i) p[i] = box[i].lo + unit(rng) * (box[i].hi - box[i].lo);
    if (contains(delta, p)) out.push_back(std::move(p));
  }
  return out;
}

std::optional<ViolationWitness> grid_violation_search(const DStabilityProblem& problem,
                                                      int points_per_axis,
                                                      const GridOptions& options) {
  const auto points = sample_delta(problem.delta(), points_per_axis, options.seed);
  std::optional<ViolationWitness> best;
  for (const auto& rho : points) {
    auto w = violation_at(problem, rho, options.tolerance);
    if (w && (!best || w->min_region_residual > best->min_region_residual)) best = std::move(w);
  }
  return best;
}

AbscissaScan max_real_part(const DStabilityProblem& problem, int points_per_axis,
                           std::uint64_t seed) {
  const auto points = sample_delta(problem.delta(), points_per_axis, seed);
  AbscissaScan scan;
  scan.max_real_part = -std::numeric_limits<double>::infinity();
  scan.points = points.size();
  for (const auto& rho : points) {
    const auto ev = eigenvalues(problem.matrix().evaluate(rho));
    if (!ev.empty() && ev.front().real() > scan.max_real_part) {
      scan.max_real_part = ev.front().real();
      scan.rho = rho;
    }
  }
  return scan;
}

AtomicLPResult atomic_lp_bound(const DStabilityProblem& problem,
                               const std::vector<std::vector<double>>& atoms, double tol) {
  if (atoms.empty()) throw Error("atomic_lp_bound: no atoms");
  const auto n = static_cast<Eigen::Index>(atoms.size());
  AtomicLPResult result;
  result.atoms = atoms;
  Eigen::VectorXd c = Eigen::VectorXd::Zero(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const auto& rho = atoms[static_cast<std::size_t>(k)];
    if (rho.size() != problem.delta().dimension()) {
      throw Error("atomic_lp_bound: atom dimension mismatch");
    }
    if (!contains(problem.delta(), rho, 1e-9)) {
      throw Error("atomic_lp_bound: atom " + std::to_string(k) + " lies outside delta");
    }
    const bool bad = violation_at(problem, rho, tol).has_value();
    result.violating.push_back(bad);
    c[k] = bad ? 1.0 : 0.0;
  }
  const auto constraints = problem.moment_constraints();
  const auto m = static_cast<Eigen::Index>(constraints.size());
  Eigen::MatrixXd a(m, n);
  Eigen::VectorXd b(m);
  std::vector<MomentRelation> rel;
  for (Eigen::Index i = 0; i < m; ++i) {
    const auto& mc = constraints[static_cast<std::size_t>(i)];
    for (Eigen::Index k = 0; k < n; ++k) a(i, k) = mc.f.evaluate(atoms[static_cast<std::size_t>(k)]);
    b[i] = mc.target;
    rel.push_back(mc.relation);
  }
  const LPResult lp = solve_lp(c, a, rel, b);
  if (lp.status != LPStatus::Optimal) {
    throw Error("atomic_lp_bound: the moment constraints cannot be met on these atoms");
  }
  result.weights.assign(lp.x.data(), lp.x.data() + lp.x.size());
  result.lower_bound = lp.objective;
  return result;
}

}  // namespace dstab
