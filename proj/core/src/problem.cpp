#include "dstab/problem.hpp"

#include <algorithm>
#include <cmath>

namespace dstab {

UncertainMatrix::UncertainMatrix(std::vector<std::string> variables, std::size_t size,
                                 std::vector<Polynomial> entries)
    : variables_(std::move(variables)), size_(size), entries_(std::move(entries)) {
  if (size_ == 0) throw Error("uncertain matrix must have positive size");
  if (entries_.size() != size_ * size_) {
    throw Error("uncertain matrix of size " + std::to_string(size_) + " needs " +
                std::to_string(size_ * size_) + " entries, got " +
                std::to_string(entries_.size()));
  }
  for (const auto& e : entries_) {
    if (e.num_vars() != variables_.size()) {
      throw Error("matrix entry is not a polynomial over the uncertainty variables");
    }
  }
}

int UncertainMatrix::degree() const {
  int d = 0;
  for (const auto& e : entries_) d = std::max(d, e.degree());
  return d;
}

bool UncertainMatrix::is_symmetric() const {
  for (std::size_t i = 0; i < size_; ++i) {
    for (std::size_t j = i + 1; j < size_; ++j) {
      if (!(entry(i, j) - entry(j, i)).is_zero()) return false;
    }
  }
  return true;
}

Eigen::MatrixXd UncertainMatrix::evaluate(std::span<const double> rho) const {
  Eigen::MatrixXd m(size_, size_);
  for (std::size_t i = 0; i < size_; ++i) {
    for (std::size_t j = 0; j < size_; ++j) m(i, j) = entry(i, j).evaluate(rho);
  }
  return m;
}

std::string to_string(EigenSpace space) {
  return space == EigenSpace::Real ? "real" : "complex";
}

std::string to_string(MomentRelation relation) {
  switch (relation) {
    case MomentRelation::Equal:
      return "=";
    case MomentRelation::LessEqual:
      return "<=";
    case MomentRelation::GreaterEqual:
      return ">=";
  }
  return "?";
}

DStabilityProblem::DStabilityProblem(UncertainMatrix matrix, SemialgebraicSet delta,
                                     StabilityRegionComplement region,
                                     std::vector<MomentConstraint> moment_constraints,
                                     std::optional<EigenSpace> eigen_space,
                                     bool allow_real_nonsymmetric)
    : matrix_(std::move(matrix)),
      delta_(std::move(delta)),
      region_(std::move(region)),
      user_constraints_(std::move(moment_constraints)),
      allow_real_nonsymmetric_(allow_real_nonsymmetric) {
  if (delta_.variables() != matrix_.variables()) {
    throw Error("delta must be defined over the matrix's uncertainty variables");
  }
  for (const auto& c : user_constraints_) {
    if (c.f.num_vars() != matrix_.variables().size()) {
      throw Error("moment constraints may only involve the uncertainty variables");
    }
  }
  if (!region_.real_spectrum_only && region_.set.variables() !=
                                         std::vector<std::string>{kLambdaRe, kLambdaIm}) {
    throw Error("instability region must be defined over (lre, lim)");
  }
  const bool symmetric = matrix_.is_symmetric();
  if (eigen_space) {
    eigen_space_ = *eigen_space;
    if (eigen_space_ == EigenSpace::Real && !symmetric && !allow_real_nonsymmetric_) {
      throw Error(
          "real eigen space requested for a non-symmetric matrix; complex eigenvalues "
          "would be ignored (set the override to force it)");
    }
  } else {
    eigen_space_ = symmetric ? EigenSpace::Real : EigenSpace::Complex;
  }
  if (region_.real_spectrum_only && eigen_space_ == EigenSpace::Complex) {
    throw Error("a real-only instability region needs the real eigen space");
  }
}

StabilityRegionComplement DStabilityProblem::effective_region() const {
  return eigen_space_ == EigenSpace::Real ? restrict_to_real(region_) : region_;
}

std::vector<MomentConstraint> DStabilityProblem::moment_constraints() const {
  std::vector<MomentConstraint> all;
  all.push_back({Polynomial::constant(matrix_.variables().size(), 1.0),
                 MomentRelation::Equal, 1.0});
  all.insert(all.end(), user_constraints_.begin(), user_constraints_.end());
  return all;
}

DStabilityProblem DStabilityProblem::with_moment_constraints(
    std::vector<MomentConstraint> constraints) const {
  return DStabilityProblem(matrix_, delta_, region_, std::move(constraints), eigen_space_,
                           allow_real_nonsymmetric_);
}

DStabilityProblem DStabilityProblem::with_delta(SemialgebraicSet delta) const {
  return DStabilityProblem(matrix_, std::move(delta), region_, user_constraints_,
                           eigen_space_, allow_real_nonsymmetric_);
}

// ---------------------------------------------------------------------------

std::optional<std::size_t> LiftedProblem::lambda_im_index() const {
  if (eigen_space == EigenSpace::Real) return std::nullopt;
  return num_params + 1;
}

std::size_t LiftedProblem::x_re_index(std::size_t i) const {
  const std::size_t lambda_count = eigen_space == EigenSpace::Real ? 1 : 2;
  return num_params + lambda_count + i;
}

std::optional<std::size_t> LiftedProblem::x_im_index(std::size_t i) const {
  if (eigen_space == EigenSpace::Real) return std::nullopt;
  return num_params + 2 + matrix_size + i;
}

std::vector<double> LiftedProblem::make_point(std::span<const double> rho, double lambda_re,
                                              double lambda_im,
                                              std::span<const double> x_re,
                                              std::span<const double> x_im) const {
  if (rho.size() != num_params || x_re.size() != matrix_size) {
    throw Error("make_point: dimension mismatch");
  }
  std::vector<double> z(num_vars(), 0.0);
  std::copy(rho.begin(), rho.end(), z.begin());
  z[lambda_re_index()] = lambda_re;
  if (auto k = lambda_im_index()) z[*k] = lambda_im;
  for (std::size_t i = 0; i < matrix_size; ++i) {
    z[x_re_index(i)] = x_re[i];
    if (auto k = x_im_index(i)) z[*k] = x_im.empty() ? 0.0 : x_im[i];
  }
  return z;
}

namespace {

Interval power_interval(const Interval& v, int k) {
  if (k == 0) return {1.0, 1.0};
  const double a = std::pow(v.lo, k);
  const double b = std::pow(v.hi, k);
  if (k % 2 == 1) return {a, b};
  const double hi = std::max(a, b);
  const double lo = (v.lo <= 0.0 && v.hi >= 0.0) ? 0.0 : std::min(a, b);
  return {lo, hi};
}

Interval multiply(const Interval& a, const Interval& b) {
  const double p[] = {a.lo * b.lo, a.lo * b.hi, a.hi * b.lo, a.hi * b.hi};
  return {*std::min_element(p, p + 4), *std::max_element(p, p + 4)};
}

Interval interval_evaluate(const Polynomial& p, const std::vector<Interval>& box) {
  Interval sum{0.0, 0.0};
  for (const auto& [alpha, c] : p.terms()) {
    Interval term{c, c};
    for (std::size_t i = 0; i < alpha.size(); ++i) {
      if (alpha[i] > 0) term = multiply(term, power_interval(box[i], alpha[i]));
    }
    sum.lo += term.lo;
    sum.hi += term.hi;
  }
  return sum;
}

}  // namespace

double spectral_bound(const UncertainMatrix& matrix, const SemialgebraicSet& delta) {
  const auto bounds = axis_bounds(delta);
  std::vector<Interval> box;
  for (std::size_t i = 0; i < bounds.size(); ++i) {
    if (!bounds[i]) {
      throw Error("spectral_bound: no interval bounds for '" + delta.variables()[i] +
                  "'; supply an explicit lambda radius");
    }
    box.push_back(*bounds[i]);
  }
  double bound = 0.0;
  for (std::size_t i = 0; i < matrix.size(); ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < matrix.size(); ++j) {
      const Interval v = interval_evaluate(matrix.entry(i, j), box);
      row += std::max(std::abs(v.lo), std::abs(v.hi));
    }
    bound = std::max(bound, row);
  }
  return bound;
}

LiftedProblem build_lifted(const DStabilityProblem& problem, const LiftOptions& options) {
  const UncertainMatrix& a = problem.matrix();
  const std::size_t n = a.size();
  const auto& rho_vars = a.variables();
  const bool real = problem.eigen_space() == EigenSpace::Real;

  LiftedProblem lifted;
  lifted.eigen_space = problem.eigen_space();
  lifted.matrix_size = n;
  lifted.num_params = rho_vars.size();

  auto& z = lifted.z_vars;
  z = rho_vars;
  z.push_back(kLambdaRe);
  if (!real) z.push_back(kLambdaIm);
  for (std::size_t i = 0; i < n; ++i) z.push_back(real ? "x" + std::to_string(i + 1)
                                                       : "xre" + std::to_string(i + 1));
  if (!real) {
    for (std::size_t i = 0; i < n; ++i) z.push_back("xim" + std::to_string(i + 1));
  }
  for (std::size_t i = 0; i < z.size(); ++i) {
    if (std::count(z.begin(), z.end(), z[i]) != 1) {
      throw Error("variable name '" + z[i] + "' clashes with a lifted variable");
    }
  }
  const std::size_t nz = z.size();

  std::vector<Constraint> q;
  for (const auto& g : problem.delta().constraints()) {
    q.push_back({embed(g.poly, rho_vars, z), g.relation});
  }
  const StabilityRegionComplement region = problem.effective_region();
  for (const auto& d : region.set.constraints()) {
    q.push_back({embed(d.poly, region.set.variables(), z), d.relation});
  }

  auto var = [&](std::size_t k) { return Polynomial::variable(nz, k); };
  std::vector<Polynomial> entries;
  for (const auto& e : a.entries()) entries.push_back(embed(e, rho_vars, z));
  auto entry = [&](std::size_t i, std::size_t j) -> const Polynomial& {
    return entries[i * n + j];
  };

  const Polynomial lre = var(lifted.lambda_re_index());
  if (real) {
    for (std::size_t i = 0; i < n; ++i) {
      Polynomial row(nz);
      for (std::size_t j = 0; j < n; ++j) row = row + entry(i, j) * var(lifted.x_re_index(j));
      row = row - lre * var(lifted.x_re_index(i));
      q.push_back({std::move(row), Relation::EqualZero});
    }
  } else {
    const Polynomial lim = var(*lifted.lambda_im_index());
    for (std::size_t i = 0; i < n; ++i) {
      Polynomial row(nz);
      for (std::size_t j = 0; j < n; ++j) row = row + entry(i, j) * var(lifted.x_re_index(j));
      row = row - lre * var(lifted.x_re_index(i)) + lim * var(*lifted.x_im_index(i));
      q.push_back({std::move(row), Relation::EqualZero});
    }
    for (std::size_t i = 0; i < n; ++i) {
      Polynomial row(nz);
      for (std::size_t j = 0; j < n; ++j) row = row + entry(i, j) * var(*lifted.x_im_index(j));
      row = row - lre * var(*lifted.x_im_index(i)) - lim * var(lifted.x_re_index(i));
      q.push_back({std::move(row), Relation::EqualZero});
    }
  }

  Polynomial norm2(nz);
  for (std::size_t i = 0; i < n; ++i) {
    norm2 = norm2 + var(lifted.x_re_index(i)) * var(lifted.x_re_index(i));
    if (auto k = lifted.x_im_index(i)) norm2 = norm2 + var(*k) * var(*k);
  }
  q.push_back({Polynomial::constant(nz, 1.0) - norm2, Relation::GreaterEqualZero});
  lifted.objective = norm2;

  double radius = 0.0;
  if (options.lambda_radius) {
    radius = *options.lambda_radius;
    if (!(radius > 0.0)) throw Error("lambda radius must be positive");
  } else if (options.auto_compactify) {
    // A zero spectrum still needs a non-degenerate disk.
    radius = std::max(spectral_bound(a, problem.delta()), 1.0);
  }
  if (radius > 0.0) {
    Polynomial disk = Polynomial::constant(nz, radius * radius) - lre * lre;
    if (auto k = lifted.lambda_im_index()) disk = disk - var(*k) * var(*k);
    q.push_back({std::move(disk), Relation::GreaterEqualZero});
  }
  lifted.lambda_radius = radius;
  lifted.support = SemialgebraicSet(z, std::move(q));

  for (const auto& m : problem.moment_constraints()) {
    lifted.moment_constraints.push_back({embed(m.f, rho_vars, z), m.relation, m.target});
  }

  lifted.coordinate_scale.assign(nz, 1.0);
  const auto bounds = axis_bounds(problem.delta());
  for (std::size_t k = 0; k < rho_vars.size(); ++k) {
    if (bounds[k]) {
      const double s = std::max(std::abs(bounds[k]->lo), std::abs(bounds[k]->hi));
      if (s > 0.0) lifted.coordinate_scale[k] = s;
    }
  }
  if (radius > 0.0) {
    lifted.coordinate_scale[lifted.lambda_re_index()] = radius;
    if (auto k = lifted.lambda_im_index()) lifted.coordinate_scale[*k] = radius;
  }
  return lifted;
}

int minimal_order(const LiftedProblem& lifted) {
  auto half_up = [](int d) { return (d + 1) / 2; };
  int tau = std::max(1, half_up(lifted.objective.degree()));
  for (const auto& f : lifted.moment_constraints) tau = std::max(tau, half_up(f.f.degree()));
  for (const auto& c : lifted.support.constraints()) {
    tau = std::max(tau, half_up(c.poly.degree()));
  }
  return tau;
}

}  // namespace dstab
