#include "dstab/relax.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

namespace dstab {

std::string to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::Optimal:
      return "Optimal";
    case SolveStatus::Infeasible:
      return "Infeasible";
    case SolveStatus::Unbounded:
      return "Unbounded";
    case SolveStatus::SlowProgress:
      return "SlowProgress";
    case SolveStatus::IterLimit:
      return "IterLimit";
  }
  return "Unknown";
}

namespace {

int half_up(int d) { return (d + 1) / 2; }

LinearConstraint linear_row(const Polynomial& f, const MonomialBasis& basis,
                            MomentRelation relation, double rhs, std::string label) {
  LinearConstraint row;
  row.relation = relation;
  row.rhs = rhs;
  row.label = std::move(label);
  for (const auto& [alpha, c] : f.terms()) row.coefficients.emplace_back(basis.index(alpha), c);
  return row;
}

struct EqualityFactor {
  Polynomial q;
  int degree = 0;
  int order = 0;
};

// Coefficients of q u in the order-t basis, for each u with L(q g u b) = 0
// implied by the equality localizer of q for every basis monomial b.
Eigen::MatrixXd structural_kernel(const std::vector<EqualityFactor>& equalities,
                                  std::size_t nz, int g_degree, int t) {
  const MonomialBasis local(nz, t);
  std::vector<Eigen::VectorXd> cols;
  for (const auto& eq : equalities) {
    const int max_u = std::min(t - eq.degree, 2 * eq.order - g_degree - t);
    if (max_u < 0) continue;
    for (std::size_t a = 0; a < local.size() && total_degree(local[a]) <= max_u; ++a) {
      Eigen::VectorXd v = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(local.size()));
      for (const auto& [alpha, c] : eq.q.terms()) {
        v[static_cast<Eigen::Index>(local.index(add_exponents(alpha, local[a])))] += c;
      }
      cols.push_back(std::move(v));
    }
  }
  Eigen::MatrixXd k(static_cast<Eigen::Index>(local.size()), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t i = 0; i < cols.size(); ++i) k.col(static_cast<Eigen::Index>(i)) = cols[i];
  return k;
}

}  // namespace

SDPProblem assemble_relaxation(const LiftedProblem& lifted, int tau,
                               const RelaxationOptions& options) {
  const int tau_min = minimal_order(lifted);
  if (tau < tau_min) {
    throw Error("relaxation order " + std::to_string(tau) + " is below the minimal order " +
                std::to_string(tau_min));
  }
  const std::size_t nz = lifted.num_vars();
  auto cache = options.cache ? options.cache : std::make_shared<FormCache>();

  SDPProblem sdp;
  sdp.tau = tau;
  sdp.num_vars = nz;
  sdp.variable_names = lifted.z_vars;
  sdp.basis = std::make_shared<const MonomialBasis>(nz, 2 * tau);
  sdp.variable_scale.assign(nz, 1.0);
  if (options.scale_variables) sdp.variable_scale = lifted.coordinate_scale;

  const std::vector<double> zero_shift(nz, 0.0);
  auto rescale = [&](const Polynomial& p) {
    Polynomial out = p.substitute_affine(zero_shift, sdp.variable_scale);
    return out.pruned(options.prune_epsilon);
  };

  const MonomialBasis& basis = *sdp.basis;
  sdp.objective = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(basis.size()));
  const Polynomial objective = rescale(lifted.objective);
  for (const auto& [alpha, c] : objective.terms()) {
    sdp.objective[static_cast<Eigen::Index>(basis.index(alpha))] += c;
  }

  for (std::size_t i = 0; i < lifted.moment_constraints.size(); ++i) {
    const auto& mc = lifted.moment_constraints[i];
    sdp.constraints.push_back(linear_row(rescale(mc.f), basis, mc.relation, mc.target,
                                         i == 0 ? "normalization" : "moment " + std::to_string(i)));
  }
  sdp.normalization_index = 0;

  const auto& cs = lifted.support.constraints();
  std::vector<Polynomial> normalized(cs.size());
  std::vector<EqualityFactor> equalities;
  for (std::size_t j = 0; j < cs.size(); ++j) {
    Polynomial q = rescale(cs[j].poly);
    if (q.is_zero()) continue;
    // Positive rescaling leaves {q >= 0} unchanged and keeps blocks O(1).
    double qmax = 0.0;
    for (const auto& [alpha, c] : q.terms()) qmax = std::max(qmax, std::abs(c));
    normalized[j] = q * (1.0 / qmax);
    if (cs[j].relation != Relation::GreaterEqualZero) {
      const int d = normalized[j].degree();
      equalities.push_back({normalized[j], d, tau - half_up(cs[j].poly.degree())});
    }
  }

  sdp.blocks.push_back({std::make_shared<const LinearMatrixForm>(moment_matrix_form(nz, tau)),
                        "moment matrix", structural_kernel(equalities, nz, 0, tau)});

  for (std::size_t j = 0; j < cs.size(); ++j) {
    const Polynomial& q = normalized[j];
    if (q.is_zero()) continue;
    const int order = tau - half_up(cs[j].poly.degree());
    const std::string label = "q" + std::to_string(j + 1);
    auto form = cache->localizing(q, order);
    if (cs[j].relation == Relation::GreaterEqualZero) {
      sdp.blocks.push_back({form, label, structural_kernel(equalities, nz, q.degree(), order)});
    } else if (options.equality_encoding == EqualityEncoding::InequalityPair) {
      sdp.blocks.push_back({form, label + "+", {}});
      sdp.blocks.push_back({cache->localizing(-q, order), label + "-", {}});
    } else {
      // Every distinct entry of M(q m) vanishes.
      const MonomialBasis local(nz, order);
      for (std::size_t a = 0; a < local.size(); ++a) {
        for (std::size_t b = a; b < local.size(); ++b) {
          const Polynomial shifted =
              q * Polynomial::monomial(add_exponents(local[a], local[b]));
          sdp.constraints.push_back(linear_row(shifted, basis, MomentRelation::Equal, 0.0,
                                               label + "[" + std::to_string(a) + "," +
                                                   std::to_string(b) + "]"));
        }
      }
    }
  }
  return sdp;
}

std::vector<double> to_relaxation_coordinates(const SDPProblem& sdp, std::span<const double> z) {
  if (z.size() != sdp.num_vars) throw Error("point dimension does not match relaxation");
  std::vector<double> out(z.begin(), z.end());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] /= sdp.variable_scale[i];
  return out;
}

MomentVector relaxation_moments(const SDPProblem& sdp,
                                const std::vector<std::vector<double>>& atoms,
                                std::span<const double> weights) {
  std::vector<std::vector<double>> scaled;
  scaled.reserve(atoms.size());
  for (const auto& a : atoms) scaled.push_back(to_relaxation_coordinates(sdp, a));
  MomentVector m = moments_of_atomic(scaled, weights, sdp.num_vars, sdp.tau);
  return MomentVector(sdp.basis, m.values());
}

ProblemStats problem_stats(const SDPProblem& sdp) {
  ProblemStats s;
  s.num_moments = sdp.num_moments();
  s.num_vars = sdp.num_vars;
  s.tau = sdp.tau;
  for (const auto& b : sdp.blocks) s.block_sizes.push_back(b.form->dimension());
  s.moment_block_size = s.block_sizes.empty() ? 0 : s.block_sizes.front();
  for (const auto& c : sdp.constraints) {
    if (c.relation == MomentRelation::Equal) {
      ++s.linear_equalities;
    } else {
      ++s.linear_inequalities;
    }
  }
  return s;
}

void export_sdp(const SDPProblem& sdp, std::ostream& out) {
  const auto old_precision = out.precision(17);
  out << "dstab-sdp 1\n";
  out << "vars " << sdp.num_vars << " tau " << sdp.tau << " moments " << sdp.num_moments()
      << "\n";
  for (std::size_t i = 0; i < sdp.num_moments(); ++i) {
    out << "moment " << i;
    for (int e : (*sdp.basis)[i]) out << ' ' << e;
    out << "\n";
  }
  for (Eigen::Index i = 0; i < sdp.objective.size(); ++i) {
    if (sdp.objective[i] != 0.0) out << "objective " << i << ' ' << sdp.objective[i] << "\n";
  }
  for (std::size_t k = 0; k < sdp.constraints.size(); ++k) {
    const auto& c = sdp.constraints[k];
    out << "linear " << k << ' ' << to_string(c.relation) << ' ' << c.rhs << ' '
        << c.coefficients.size() << "\n";
    for (const auto& [idx, v] : c.coefficients) out << idx << ' ' << v << "\n";
  }
  for (std::size_t k = 0; k < sdp.blocks.size(); ++k) {
    const auto& form = *sdp.blocks[k].form;
    std::size_t nnz = 0;
    for (const auto& t : form.terms()) nnz += t.entries.size();
    out << "block " << k << ' ' << form.dimension() << ' ' << nnz << "\n";
    for (const auto& t : form.terms()) {
      const std::size_t idx = sdp.basis->index(t.alpha);
      for (const auto& e : t.entries) {
        out << idx << ' ' << e.row << ' ' << e.col << ' ' << e.value << "\n";
      }
    }
  }
  out.precision(old_precision);
}

}  // namespace dstab
