#include "dstab/sdp.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <ostream>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>

namespace dstab {

void SolverSettings::validate() const {
  if (max_iterations <= 0) throw Error("solver: max_iterations must be positive");
  if (!(feasibility_tolerance > 0.0) || !(gap_tolerance > 0.0)) {
    throw Error("solver: tolerances must be positive");
  }
  if (!(step_fraction > 0.0 && step_fraction < 1.0)) {
    throw Error("solver: step fraction must lie in (0,1)");
  }
  if (!(initial_scale > 0.0)) throw Error("solver: initial scale must be positive");
  if (!(infeasibility_threshold > 1.0)) throw Error("solver: infeasibility threshold must exceed 1");
}

namespace {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

struct VariableEntries {
  Index var;
  std::vector<MatrixEntry> entries;
};

// S(y) = constant + sum_k y_k A_k.
struct SlackBlock {
  Index dim = 0;
  MatrixXd constant;
  std::vector<VariableEntries> coeffs;
  bool from_inequality = false;
  std::size_t origin = 0;  // index into sdp.blocks or sdp.constraints
  double sign = 1.0;       // inequality orientation
  MatrixXd face;           // reduced block = face^T * original * face; empty means identity

  Index full_dim() const { return face.size() == 0 ? dim : face.rows(); }
  MatrixXd restrict(const MatrixXd& full) const {
    return face.size() == 0 ? full : MatrixXd(face.transpose() * full * face);
  }
  MatrixXd lift(const MatrixXd& reduced) const {
    return face.size() == 0 ? reduced : MatrixXd(face * reduced * face.transpose());
  }
};

// An equality row is either a user constraint or one entry (row, col) of a
// folded block pair.
struct EqualityOrigin {
  bool from_block = false;
  std::size_t index = 0;
  std::size_t row = 0;
  std::size_t col = 0;
};

bool is_negated_pair(const LinearMatrixForm& a, const LinearMatrixForm& b) {
  if (a.dimension() != b.dimension() || a.terms().size() != b.terms().size()) return false;
  for (std::size_t t = 0; t < a.terms().size(); ++t) {
    const auto& ta = a.terms()[t];
    const auto& tb = b.terms()[t];
    if (ta.alpha != tb.alpha || ta.entries.size() != tb.entries.size()) return false;
    for (std::size_t e = 0; e < ta.entries.size(); ++e) {
      const auto& ea = ta.entries[e];
      const auto& eb = tb.entries[e];
      if (ea.row != eb.row || ea.col != eb.col || ea.value != -eb.value) return false;
    }
  }
  return true;
}

struct Model {
  Index n = 0;
  VectorXd b;
  double objective_scale = 1.0;
  std::vector<SlackBlock> blocks;
  MatrixXd E;
  VectorXd e;
  std::vector<EqualityOrigin> eq_origin;
  std::vector<double> eq_row_scale;
  /// Block indices of (q, -q) pairs handled as entrywise equalities.
  std::vector<std::pair<std::size_t, std::size_t>> folded_pairs;
  Index total_dim = 0;
  bool inconsistent_equalities = false;
};

// Orthonormal basis of the complement of span(kernel).
MatrixXd kernel_complement(const MatrixXd& kernel) {
  Eigen::JacobiSVD<MatrixXd> svd(kernel, Eigen::ComputeFullU);
  const VectorXd& sv = svd.singularValues();
  const double cut = 1e-10 * (sv.size() > 0 ? sv[0] : 0.0);
  Index rank = 0;
  while (rank < sv.size() && sv[rank] > cut) ++rank;
  return svd.matrixU().rightCols(kernel.rows() - rank);
}

Model build_model(const SDPProblem& sdp) {
  Model model;
  model.n = static_cast<Index>(sdp.num_moments());
  const double hnorm = sdp.objective.lpNorm<Eigen::Infinity>();
  model.objective_scale = hnorm > 0.0 ? hnorm : 1.0;
  model.b = -sdp.objective / model.objective_scale;

  std::vector<VectorXd> rows;
  std::vector<double> rhs;
  auto push_row = [&](VectorXd row, double r, EqualityOrigin origin) {
    const double s = row.lpNorm<Eigen::Infinity>();
    if (s == 0.0) {
      if (r != 0.0) model.inconsistent_equalities = true;
      return;
    }
    rows.push_back(row / s);
    rhs.push_back(r / s);
    model.eq_origin.push_back(origin);
    model.eq_row_scale.push_back(1.0 / s);
  };

  for (std::size_t k = 0; k < sdp.blocks.size(); ++k) {
    const auto& form = *sdp.blocks[k].form;
    // A block and its negation force form(m) = 0; such pairs have no
    // interior, so each entry becomes a linear equality instead.
    if (k + 1 < sdp.blocks.size() && is_negated_pair(form, *sdp.blocks[k + 1].form)) {
      std::map<std::pair<std::size_t, std::size_t>, VectorXd> entry_rows;
      for (const auto& t : form.terms()) {
        const auto idx = static_cast<Index>(sdp.basis->index(t.alpha));
        for (const auto& e : t.entries) {
          auto [it, fresh] = entry_rows.try_emplace({e.row, e.col}, VectorXd());
          if (fresh) it->second = VectorXd::Zero(model.n);
          it->second[idx] += e.value;
        }
      }
      for (auto& [rc, row] : entry_rows) push_row(std::move(row), 0.0, {true, k, rc.first, rc.second});
      model.folded_pairs.emplace_back(k, k + 1);
      ++k;
      continue;
    }
    SlackBlock blk;
    blk.dim = static_cast<Index>(form.dimension());
    blk.origin = k;
    const MatrixXd& kernel = sdp.blocks[k].kernel;
    if (kernel.cols() > 0) {
      blk.face = kernel_complement(kernel);
      // A block vanishing on the whole feasible set carries no constraint.
      if (blk.face.cols() == 0) continue;
      if (blk.face.cols() == blk.dim) blk.face.resize(0, 0);
    }
    // Coefficients stay sparse in the original coordinates.
    for (const auto& t : form.terms()) {
      blk.coeffs.push_back({static_cast<Index>(sdp.basis->index(t.alpha)), t.entries});
    }
    if (blk.face.size() > 0) blk.dim = blk.face.cols();
    blk.constant = MatrixXd::Zero(blk.dim, blk.dim);
    std::sort(blk.coeffs.begin(), blk.coeffs.end(),
              [](const auto& a, const auto& b) { return a.var < b.var; });
    model.blocks.push_back(std::move(blk));
  }

  for (std::size_t k = 0; k < sdp.constraints.size(); ++k) {
    const auto& c = sdp.constraints[k];
    if (c.relation == MomentRelation::Equal) {
      VectorXd row = VectorXd::Zero(model.n);
      for (const auto& [idx, v] : c.coefficients) row[static_cast<Index>(idx)] += v;
      push_row(std::move(row), c.rhs, {false, k, 0, 0});
    } else {
      SlackBlock blk;
      blk.dim = 1;
      blk.from_inequality = true;
      blk.origin = k;
      blk.sign = c.relation == MomentRelation::GreaterEqual ? 1.0 : -1.0;
      double s = 0.0;
      for (const auto& [idx, v] : c.coefficients) s = std::max(s, std::abs(v));
      if (s == 0.0) s = 1.0;
      blk.constant = MatrixXd::Constant(1, 1, -blk.sign * c.rhs / s);
      std::vector<std::pair<std::size_t, double>> coef = c.coefficients;
      std::sort(coef.begin(), coef.end());
      for (const auto& [idx, v] : coef) {
        if (!blk.coeffs.empty() && blk.coeffs.back().var == static_cast<Index>(idx)) {
          blk.coeffs.back().entries[0].value += blk.sign * v / s;
        } else {
          blk.coeffs.push_back({static_cast<Index>(idx), {{0, 0, blk.sign * v / s}}});
        }
      }
      model.blocks.push_back(std::move(blk));
    }
  }

  // Keep a maximal independent subset of the equality rows.
  if (!rows.empty()) {
    MatrixXd all(static_cast<Index>(rows.size()), model.n);
    VectorXd all_rhs(static_cast<Index>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
      all.row(static_cast<Index>(i)) = rows[i].transpose();
      all_rhs[static_cast<Index>(i)] = rhs[i];
    }
    Eigen::ColPivHouseholderQR<MatrixXd> qr(all.transpose());
    qr.setThreshold(1e-10);
    const Index rank = qr.rank();
    std::vector<Index> keep;
    for (Index i = 0; i < rank; ++i) keep.push_back(qr.colsPermutation().indices()[i]);
    std::sort(keep.begin(), keep.end());
    model.E.resize(static_cast<Index>(keep.size()), model.n);
    model.e.resize(static_cast<Index>(keep.size()));
    std::vector<EqualityOrigin> origin;
    std::vector<double> scale;
    for (std::size_t i = 0; i < keep.size(); ++i) {
      model.E.row(static_cast<Index>(i)) = all.row(keep[i]);
      model.e[static_cast<Index>(i)] = all_rhs[keep[i]];
      origin.push_back(model.eq_origin[static_cast<std::size_t>(keep[i])]);
      scale.push_back(model.eq_row_scale[static_cast<std::size_t>(keep[i])]);
    }
    if (rank < all.rows()) {
      // Dropped rows must be implied by the kept ones.
      const VectorXd y = model.E.colPivHouseholderQr().solve(model.e);
      const VectorXd r = all * y - all_rhs;
      if (r.lpNorm<Eigen::Infinity>() > 1e-8 * (1.0 + all_rhs.lpNorm<Eigen::Infinity>())) {
        model.inconsistent_equalities = true;
      }
    }
    model.eq_origin = std::move(origin);
    model.eq_row_scale = std::move(scale);
  } else {
    model.E.resize(0, model.n);
    model.e.resize(0);
  }

  for (const auto& blk : model.blocks) model.total_dim += blk.dim;
  return model;
}

// sum_k y_k A_k in the original coordinates.
MatrixXd linear_full(const SlackBlock& blk, const VectorXd& y) {
  const Index d = blk.full_dim();
  MatrixXd s = MatrixXd::Zero(d, d);
  for (const auto& vc : blk.coeffs) {
    const double v = y[vc.var];
    if (v == 0.0) continue;
    for (const auto& e : vc.entries) {
      s(static_cast<Index>(e.row), static_cast<Index>(e.col)) += e.value * v;
      if (e.row != e.col) s(static_cast<Index>(e.col), static_cast<Index>(e.row)) += e.value * v;
    }
  }
  return s;
}

MatrixXd linear_part(const SlackBlock& blk, const VectorXd& dy) {
  return blk.restrict(linear_full(blk, dy));
}

MatrixXd slack_value(const SlackBlock& blk, const VectorXd& y) {
  return blk.constant + linear_part(blk, y);
}

// out_k += <A_k, G> for symmetric A_k; G need not be symmetric.
void add_adjoint(const SlackBlock& blk, const MatrixXd& reduced, VectorXd& out) {
  const MatrixXd g = blk.lift(reduced);
  for (const auto& vc : blk.coeffs) {
    double acc = 0.0;
    for (const auto& e : vc.entries) {
      const auto r = static_cast<Index>(e.row);
      const auto c = static_cast<Index>(e.col);
      acc += e.row == e.col ? e.value * g(r, r) : e.value * (g(r, c) + g(c, r));
    }
    out[vc.var] += acc;
  }
}

// H_kl += tr(A_k X A_l Zinv). On a reduced face this equals the same trace
// with the original coefficients and X, Zinv lifted by the face basis.
void add_schur(const SlackBlock& blk, const MatrixXd& xr, const MatrixXd& zr, MatrixXd& h) {
  const MatrixXd x = blk.lift(xr);
  const MatrixXd zinv = blk.lift(zr);
  if (blk.dim == 1) {
    const double f = x(0, 0) * zinv(0, 0);
    for (const auto& a : blk.coeffs) {
      const double va = a.entries[0].value;
      for (const auto& b : blk.coeffs) h(a.var, b.var) += f * va * b.entries[0].value;
    }
    return;
  }
  MatrixXd t(x.rows(), x.cols());
  for (const auto& l : blk.coeffs) {
    // t = X A_l Zinv
    t.setZero();
    for (const auto& e : l.entries) {
      const auto r = static_cast<Index>(e.row);
      const auto s = static_cast<Index>(e.col);
      t.noalias() += e.value * x.col(r) * zinv.row(s);
      if (r != s) t.noalias() += e.value * x.col(s) * zinv.row(r);
    }
    for (const auto& k : blk.coeffs) {
      if (k.var > l.var) break;
      double acc = 0.0;
      for (const auto& e : k.entries) {
        const auto i = static_cast<Index>(e.row);
        const auto j = static_cast<Index>(e.col);
        acc += i == j ? e.value * t(i, i) : e.value * (t(j, i) + t(i, j));
      }
      h(k.var, l.var) += acc;
    }
  }
}

// Largest alpha <= 1 keeping M + alpha * dM positive semidefinite, scaled by
// the step fraction when the boundary is hit.
double max_step(const Eigen::LLT<MatrixXd>& chol, const MatrixXd& dm) {
  const MatrixXd l = chol.matrixL();
  MatrixXd tmp = l.triangularView<Eigen::Lower>().solve(dm);
  MatrixXd w = l.triangularView<Eigen::Lower>().solve(tmp.transpose());
  w = 0.5 * (w + w.transpose());
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(w, Eigen::EigenvaluesOnly);
  const double lmin = es.eigenvalues().minCoeff();
  if (lmin >= 0.0) return std::numeric_limits<double>::infinity();
  return -1.0 / lmin;
}

struct Iterate {
  VectorXd y;
  VectorXd w;
  std::vector<MatrixXd> x;
  std::vector<MatrixXd> z;
};

struct Measures {
  double pinf = 0.0;
  double dinf = 0.0;
  double gap = 0.0;
  double pobj = 0.0;
  double dobj = 0.0;
  double mu = 0.0;
  double merit() const { return std::max({pinf, dinf, gap}); }
};

double frob_inner(const MatrixXd& a, const MatrixXd& b) { return a.cwiseProduct(b).sum(); }

class InteriorPoint {
 public:
  InteriorPoint(const SDPProblem& sdp, const SolverSettings& settings)
      : sdp_(sdp), settings_(settings), model_(build_model(sdp)) {}

  SDPSolution run();

 private:
  void initialize();
  void solve_kkt(const VectorXd& rhs, const VectorXd& re, VectorXd& dy, VectorXd& dw) const;
  void residuals(const Iterate& it, std::vector<MatrixXd>& rp, VectorXd& rd, VectorXd& re,
                 Measures& m) const;
  bool factorize(const Iterate& it, const std::vector<MatrixXd>& zinv);
  void direction(const Iterate& it, const std::vector<MatrixXd>& zinv,
                 const std::vector<MatrixXd>& rp, const VectorXd& rd, const VectorXd& re,
                 double mu_target, const std::vector<MatrixXd>* corr, VectorXd& dy,
                 VectorXd& dw, std::vector<MatrixXd>& dz, std::vector<MatrixXd>& dx) const;
  SDPSolution finish(const Iterate& it, SolveStatus status, int iterations) const;

  const SDPProblem& sdp_;
  const SolverSettings& settings_;
  Model model_;
  Iterate cur_;
  MatrixXd h_;
  // Equality rows are handled in the null space of E: E^T = [Q1 Q2] [R; 0],
  // dy = Q1 R^-T re + Q2 u.
  MatrixXd range_;
  MatrixXd null_;
  MatrixXd rtri_;
  MatrixXd refl_;  // Householder vectors of E^T, unit lower trapezoidal
  MatrixXd tfac_;  // Q = I - refl_ tfac_ refl_^T
  Eigen::LLT<MatrixXd> hfac_;
  double cnorm_ = 0.0;
};

void InteriorPoint::initialize() {
  cur_.y = VectorXd::Zero(model_.n);
  cur_.y[static_cast<Index>(sdp_.normalization_index)] = 1.0;
  if (!sdp_.constraints.empty() && sdp_.normalization_index < sdp_.constraints.size()) {
    // Start from m = e_0 scaled to satisfy the normalization row.
    const auto& c = sdp_.constraints[sdp_.normalization_index];
    cur_.y.setZero();
    for (const auto& [idx, v] : c.coefficients) {
      if (v != 0.0) {
        cur_.y[static_cast<Index>(idx)] = c.rhs / v;
        break;
      }
    }
  }
  cur_.w = VectorXd::Zero(model_.E.rows());
  if (model_.E.rows() > 0) {
    const Index r = model_.E.rows();
    const Eigen::HouseholderQR<MatrixXd> qr(model_.E.transpose());
    const MatrixXd q = qr.householderQ();
    range_ = q.leftCols(r);
    null_ = q.rightCols(model_.n - r);
    rtri_ = qr.matrixQR().topRows(r).triangularView<Eigen::Upper>();
    refl_ = qr.matrixQR().triangularView<Eigen::StrictlyLower>();
    refl_.diagonal().setOnes();
    const VectorXd& hc = qr.hCoeffs();
    tfac_ = MatrixXd::Zero(r, r);
    for (Index i = 0; i < r; ++i) {
      tfac_(i, i) = hc[i];
      if (i == 0) continue;
      const VectorXd vv = refl_.leftCols(i).transpose() * refl_.col(i);
      const VectorXd tv = tfac_.topLeftCorner(i, i).triangularView<Eigen::Upper>() * vv;
      tfac_.col(i).head(i) = -hc[i] * tv;
    }
  }
  for (const auto& blk : model_.blocks) {
    cur_.x.push_back(settings_.initial_scale * MatrixXd::Identity(blk.dim, blk.dim));
    cur_.z.push_back(settings_.initial_scale * MatrixXd::Identity(blk.dim, blk.dim));
    cnorm_ = std::max(cnorm_, blk.constant.lpNorm<Eigen::Infinity>());
  }
}

void InteriorPoint::residuals(const Iterate& it, std::vector<MatrixXd>& rp, VectorXd& rd,
                              VectorXd& re, Measures& m) const {
  rp.resize(model_.blocks.size());
  rd = model_.b;
  double pinf = 0.0;
  double xz = 0.0;
  double cx = 0.0;
  VectorXd adj = VectorXd::Zero(model_.n);
  for (std::size_t k = 0; k < model_.blocks.size(); ++k) {
    const auto& blk = model_.blocks[k];
    rp[k] = slack_value(blk, it.y) - it.z[k];
    pinf = std::max(pinf, rp[k].lpNorm<Eigen::Infinity>());
    add_adjoint(blk, it.x[k], adj);
    xz += frob_inner(it.x[k], it.z[k]);
    cx += frob_inner(blk.constant, it.x[k]);
  }
  rd -= adj;
  if (model_.E.rows() > 0) rd -= model_.E.transpose() * it.w;
  re = model_.e - model_.E * it.y;
  const double enorm = model_.e.size() ? model_.e.lpNorm<Eigen::Infinity>() : 0.0;
  m.pinf = std::max(pinf / (1.0 + cnorm_), re.size() ? re.lpNorm<Eigen::Infinity>() / (1.0 + enorm) : 0.0);
  m.dinf = rd.lpNorm<Eigen::Infinity>() / (1.0 + model_.b.lpNorm<Eigen::Infinity>());
  m.pobj = model_.b.dot(it.y);
  m.dobj = -cx + (model_.e.size() ? model_.e.dot(it.w) : 0.0);
  m.gap = std::abs(m.pobj - m.dobj) / std::max(1.0, 0.5 * (std::abs(m.pobj) + std::abs(m.dobj)));
  m.mu = xz / static_cast<double>(model_.total_dim);
}

bool InteriorPoint::factorize(const Iterate& it, const std::vector<MatrixXd>& zinv) {
  h_.setZero(model_.n, model_.n);
  for (std::size_t k = 0; k < model_.blocks.size(); ++k) {
    add_schur(model_.blocks[k], it.x[k], zinv[k], h_);
  }
  h_.triangularView<Eigen::StrictlyLower>() = h_.transpose().triangularView<Eigen::StrictlyLower>();
  MatrixXd reduced;
  const Index r = model_.E.rows();
  const Index nr = model_.n - r;
  // The reflector form costs about n^2 r + 2 n r^2 flops, the explicit null
  // basis n^2 (n - r) + n (n - r)^2; take the cheaper one.
  const double n = static_cast<double>(model_.n);
  const bool use_reflectors = n * r + 2.0 * r * r < n * nr + 1.0 * nr * nr;
  if (r > 0 && !use_reflectors) {
    const MatrixXd hn = h_ * null_;
    reduced = null_.transpose() * hn;
  } else if (r > 0) {
    // Trailing block of Q^T H Q with Q = I - V T V^T, as H - W V^T - V W^T
    // where W = H V T - V T^T (V^T H V) T / 2.
    const MatrixXd p = h_ * refl_;
    const MatrixXd pt = p * tfac_.triangularView<Eigen::Upper>();
    const MatrixXd inner = tfac_.transpose() * (refl_.transpose() * pt);
    const MatrixXd w = pt.bottomRows(nr) - 0.5 * refl_.bottomRows(nr) * inner;
    const MatrixXd m = w * refl_.bottomRows(nr).transpose();
    reduced = h_.bottomRightCorner(nr, nr) - m - m.transpose();
  } else {
    reduced = h_;
  }
  if (reduced.rows() == 0) return true;
  hfac_.compute(reduced);
  const double dmax = std::max(1.0, reduced.diagonal().maxCoeff());
  for (double reg = 1e-14; hfac_.info() != Eigen::Success; reg *= 100.0) {
    if (reg > 1e-6) return false;
    MatrixXd shifted = reduced;
    shifted.diagonal().array() += reg * dmax;
    hfac_.compute(shifted);
  }
  return true;
}

// Solves H dy - E^T dw = rhs, E dy = re.
void InteriorPoint::solve_kkt(const VectorXd& rhs, const VectorXd& re, VectorXd& dy,
                              VectorXd& dw) const {
  if (model_.E.rows() == 0) {
    dy = hfac_.solve(rhs);
    dw.resize(0);
    return;
  }
  dy = range_ * rtri_.transpose().triangularView<Eigen::Lower>().solve(re);
  if (null_.cols() > 0) dy += null_ * hfac_.solve(null_.transpose() * (rhs - h_ * dy));
  dw = rtri_.triangularView<Eigen::Upper>().solve(range_.transpose() * (h_ * dy - rhs));
}

void InteriorPoint::direction(const Iterate& it, const std::vector<MatrixXd>& zinv,
                              const std::vector<MatrixXd>& rp, const VectorXd& rd,
                              const VectorXd& re, double mu_target,
                              const std::vector<MatrixXd>* corr, VectorXd& dy, VectorXd& dw,
                              std::vector<MatrixXd>& dz, std::vector<MatrixXd>& dx) const {
  const std::size_t nb = model_.blocks.size();
  std::vector<MatrixXd> g(nb);
  VectorXd rhs = -rd;
  for (std::size_t k = 0; k < nb; ++k) {
    g[k] = mu_target * zinv[k] - it.x[k] - it.x[k] * rp[k] * zinv[k];
    if (corr) g[k] -= (*corr)[k];
    add_adjoint(model_.blocks[k], g[k], rhs);
  }
  solve_kkt(rhs, re, dy, dw);
  dz.resize(nb);
  dx.resize(nb);
  auto recover = [&] {
    for (std::size_t k = 0; k < nb; ++k) {
      dz[k] = rp[k] + linear_part(model_.blocks[k], dy);
      MatrixXd d = g[k] + it.x[k] * rp[k] * zinv[k] - it.x[k] * dz[k] * zinv[k];
      dx[k] = 0.5 * (d + d.transpose());
    }
  };
  recover();
  // Iterative refinement on the dual equation A*(dX) + E^T dw = rd, kept
  // while the defect shrinks.
  const double rd_scale = 1.0 + rd.lpNorm<Eigen::Infinity>();
  double last = std::numeric_limits<double>::infinity();
  for (int pass = 0; pass < 8; ++pass) {
    VectorXd defect = rd;
    for (std::size_t k = 0; k < nb; ++k) {
      VectorXd adj = VectorXd::Zero(model_.n);
      add_adjoint(model_.blocks[k], dx[k], adj);
      defect -= adj;
    }
    if (dw.size()) defect -= model_.E.transpose() * dw;
    const double size = defect.lpNorm<Eigen::Infinity>();
    if (size <= 1e-15 * rd_scale || size >= 0.5 * last) break;
    last = size;
    VectorXd ddy, ddw;
    solve_kkt(-defect, VectorXd::Zero(model_.E.rows()), ddy, ddw);
    dy += ddy;
    if (dw.size()) dw += ddw;
    recover();
  }
}

SDPSolution InteriorPoint::run() {
  settings_.validate();
  if (model_.blocks.empty()) throw Error("solve: the SDP has no PSD block");
  initialize();
  if (model_.inconsistent_equalities) {
    return finish(cur_, SolveStatus::Infeasible, 0);
  }

  const std::size_t nb = model_.blocks.size();
  Iterate best = cur_;
  Measures best_measures;
  double best_merit = std::numeric_limits<double>::infinity();
  auto near_optimal = [&](const Measures& bm) {
    const double slack = 10.0;
    const bool ok = bm.pinf <= slack * settings_.feasibility_tolerance &&
                    bm.dinf <= slack * settings_.feasibility_tolerance &&
                    bm.gap <= slack * settings_.gap_tolerance;
    return ok ? SolveStatus::Optimal : SolveStatus::SlowProgress;
  };
  int stalled = 0;
  std::vector<MatrixXd> rp, zinv(nb), dz, dx, dza, dxa, corr(nb);
  VectorXd rd, re, dy, dw, dya, dwa;

  if (settings_.log) {
    *settings_.log << "iter        mu          pinf        dinf        gap         "
                      "pobj         dobj         alpha_p  alpha_d\n";
  }

  for (int iter = 0; iter < settings_.max_iterations; ++iter) {
    Measures m;
    residuals(cur_, rp, rd, re, m);
    if (m.merit() < best_merit) {
      best_merit = m.merit();
      best_measures = m;
      best = cur_;
    }
    if (m.pinf <= settings_.feasibility_tolerance && m.dinf <= settings_.feasibility_tolerance &&
        m.gap <= settings_.gap_tolerance) {
      return finish(cur_, SolveStatus::Optimal, iter);
    }
    // A diverging dual objective whose residual stays small relative to it
    // is a Farkas ray for the primal; the mirror case flags unboundedness.
    const double thr = settings_.infeasibility_threshold;
    if (m.dobj > thr * std::max(1.0, std::abs(m.pobj)) && m.dinf <= 1e-6 * m.dobj) {
      return finish(cur_, SolveStatus::Infeasible, iter);
    }
    if (m.pobj < -thr * std::max(1.0, std::abs(m.dobj)) && m.pinf <= 1e-6 * -m.pobj) {
      return finish(cur_, SolveStatus::Unbounded, iter);
    }
    // Past this point the Schur complement is too ill-conditioned to make
    // further progress; fall back to the best iterate seen.
    if (m.merit() > 1e3 * best_merit || m.mu < 1e-16) {
      return finish(best, near_optimal(best_measures), iter);
    }

    std::vector<Eigen::LLT<MatrixXd>> zchol(nb), xchol(nb);
    bool ok = true;
    for (std::size_t k = 0; k < nb && ok; ++k) {
      zchol[k].compute(cur_.z[k]);
      xchol[k].compute(cur_.x[k]);
      ok = zchol[k].info() == Eigen::Success && xchol[k].info() == Eigen::Success;
      if (ok) zinv[k] = zchol[k].solve(MatrixXd::Identity(cur_.z[k].rows(), cur_.z[k].cols()));
    }
    if (!ok || !factorize(cur_, zinv)) {
      return finish(best, near_optimal(best_measures), iter);
    }

    // Predictor.
    direction(cur_, zinv, rp, rd, re, 0.0, nullptr, dya, dwa, dza, dxa);
    double ap = 1.0, ad = 1.0;
    for (std::size_t k = 0; k < nb; ++k) {
      ap = std::min(ap, max_step(zchol[k], dza[k]));
      ad = std::min(ad, max_step(xchol[k], dxa[k]));
    }
    double mu_aff = 0.0;
    for (std::size_t k = 0; k < nb; ++k) {
      mu_aff += frob_inner(cur_.x[k] + ad * dxa[k], cur_.z[k] + ap * dza[k]);
    }
    mu_aff /= static_cast<double>(model_.total_dim);
    double sigma = m.mu > 0.0 ? std::pow(std::max(0.0, mu_aff) / m.mu, 3) : 0.0;
    sigma = std::clamp(sigma, 0.0, 1.0);
    if (m.pinf > 1e-2 || m.dinf > 1e-2) sigma = std::max(sigma, 0.1);

    // Corrector.
    for (std::size_t k = 0; k < nb; ++k) corr[k] = dxa[k] * dza[k] * zinv[k];
    direction(cur_, zinv, rp, rd, re, sigma * m.mu, &corr, dy, dw, dz, dx);
    double ap_max = std::numeric_limits<double>::infinity();
    double ad_max = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < nb; ++k) {
      ap_max = std::min(ap_max, max_step(zchol[k], dz[k]));
      ad_max = std::min(ad_max, max_step(xchol[k], dx[k]));
    }
    const double gamma = settings_.step_fraction;
    ap = std::min(1.0, gamma * ap_max);
    ad = std::min(1.0, gamma * ad_max);

    cur_.y += ap * dy;
    for (std::size_t k = 0; k < nb; ++k) {
      cur_.z[k] += ap * dz[k];
      cur_.z[k] = 0.5 * (cur_.z[k] + cur_.z[k].transpose());
      cur_.x[k] += ad * dx[k];
      cur_.x[k] = 0.5 * (cur_.x[k] + cur_.x[k].transpose());
    }
    if (dw.size()) cur_.w += ad * dw;

    if (settings_.log) {
      char line[256];
      std::snprintf(line, sizeof line,
                    "%4d  %10.3e  %10.3e  %10.3e  %10.3e  %12.5e  %12.5e  %7.4f  %7.4f\n", iter,
                    m.mu, m.pinf, m.dinf, m.gap, m.pobj, m.dobj, ap, ad);
      *settings_.log << line;
    }

    stalled = (ap < 1e-8 && ad < 1e-8) ? stalled + 1 : 0;
    if (stalled >= 3) return finish(best, near_optimal(best_measures), iter + 1);
  }
  Measures m;
  residuals(cur_, rp, rd, re, m);
  if (m.merit() < best_merit) {
    best = cur_;
    best_measures = m;
  }
  const SolveStatus st = near_optimal(best_measures);
  return finish(best, st == SolveStatus::Optimal ? st : SolveStatus::IterLimit,
                settings_.max_iterations);
}

SDPSolution InteriorPoint::finish(const Iterate& it, SolveStatus status, int iterations) const {
  SDPSolution sol;
  sol.status = status;
  sol.iterations = iterations;
  sol.moments = MomentVector(sdp_.basis, it.y);
  const double s = model_.objective_scale;

  sol.dual_multipliers = VectorXd::Zero(static_cast<Index>(sdp_.constraints.size()));
  sol.dual_blocks.resize(sdp_.blocks.size());
  std::map<std::size_t, MatrixXd> folded;
  for (const auto& [plus, minus] : model_.folded_pairs) {
    const auto d = static_cast<Index>(sdp_.blocks[plus].form->dimension());
    folded[plus] = MatrixXd::Zero(d, d);
  }
  for (Index i = 0; i < model_.E.rows(); ++i) {
    const auto& origin = model_.eq_origin[static_cast<std::size_t>(i)];
    const double nu = s * it.w[i] * model_.eq_row_scale[static_cast<std::size_t>(i)];
    if (!origin.from_block) {
      sol.dual_multipliers[static_cast<Index>(origin.index)] += nu;
      continue;
    }
    auto& w = folded[origin.index];
    const auto r = static_cast<Index>(origin.row);
    const auto c = static_cast<Index>(origin.col);
    if (r == c) {
      w(r, r) += nu;
    } else {
      w(r, c) += 0.5 * nu;
      w(c, r) += 0.5 * nu;
    }
  }
  // W = X+ - X- with both parts PSD.
  for (const auto& [plus, minus] : model_.folded_pairs) {
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(folded[plus]);
    const VectorXd ev = es.eigenvalues();
    const MatrixXd& v = es.eigenvectors();
    sol.dual_blocks[plus] = v * ev.cwiseMax(0.0).asDiagonal() * v.transpose();
    sol.dual_blocks[minus] = v * (-ev).cwiseMax(0.0).asDiagonal() * v.transpose();
  }
  for (std::size_t k = 0; k < model_.blocks.size(); ++k) {
    const auto& blk = model_.blocks[k];
    if (blk.from_inequality) {
      // Block row was divided by its largest coefficient.
      double scale = 0.0;
      for (const auto& [idx, v] : sdp_.constraints[blk.origin].coefficients) {
        scale = std::max(scale, std::abs(v));
      }
      if (scale == 0.0) scale = 1.0;
      sol.dual_multipliers[static_cast<Index>(blk.origin)] += blk.sign * s * it.x[k](0, 0) / scale;
    } else {
      sol.dual_blocks[blk.origin] =
          blk.face.size() == 0 ? MatrixXd(s * it.x[k])
                               : MatrixXd(s * blk.face * it.x[k] * blk.face.transpose());
    }
  }

  sol.primal_value = sdp_.objective.dot(it.y);
  double dual = 0.0;
  for (std::size_t k = 0; k < sdp_.constraints.size(); ++k) {
    dual -= sol.dual_multipliers[static_cast<Index>(k)] * sdp_.constraints[k].rhs;
  }
  sol.dual_value = dual;

  if (status == SolveStatus::Infeasible) {
    sol.certificate = std::make_pair(sol.dual_multipliers, sol.dual_blocks);
  }
  sol.residuals = dstab::residuals(sdp_, sol);
  return sol;
}

}  // namespace

SDPSolution solve(const SDPProblem& sdp, const SolverSettings& settings) {
  InteriorPoint ipm(sdp, settings);
  return ipm.run();
}

std::vector<double> block_min_eigenvalues(const SDPProblem& sdp, const MomentVector& m) {
  std::vector<double> out;
  for (const auto& b : sdp.blocks) {
    const MatrixXd v = assemble(*b.form, m);
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(v, Eigen::EigenvaluesOnly);
    out.push_back(es.eigenvalues().minCoeff());
  }
  return out;
}

namespace {

double row_value(const LinearConstraint& c, const VectorXd& m) {
  double v = 0.0;
  for (const auto& [idx, a] : c.coefficients) v += a * m[static_cast<Index>(idx)];
  return v;
}

}  // namespace

double primal_infeasibility(const SDPProblem& sdp, const MomentVector& m) {
  double worst = 0.0;
  for (const auto& c : sdp.constraints) {
    const double v = row_value(c, m.values());
    switch (c.relation) {
      case MomentRelation::Equal:
        worst = std::max(worst, std::abs(v - c.rhs));
        break;
      case MomentRelation::LessEqual:
        worst = std::max(worst, v - c.rhs);
        break;
      case MomentRelation::GreaterEqual:
        worst = std::max(worst, c.rhs - v);
        break;
    }
  }
  for (double lmin : block_min_eigenvalues(sdp, m)) worst = std::max(worst, -lmin);
  return worst;
}

Residuals residuals(const SDPProblem& sdp, const SDPSolution& solution) {
  Residuals r;
  r.primal_infeasibility = primal_infeasibility(sdp, solution.moments);

  VectorXd stationarity = sdp.objective;
  for (std::size_t k = 0; k < sdp.blocks.size(); ++k) {
    if (k >= solution.dual_blocks.size() || solution.dual_blocks[k].size() == 0) continue;
    const MatrixXd& x = solution.dual_blocks[k];
    for (const auto& t : sdp.blocks[k].form->terms()) {
      double acc = 0.0;
      for (const auto& e : t.entries) {
        const auto i = static_cast<Index>(e.row);
        const auto j = static_cast<Index>(e.col);
        acc += i == j ? e.value * x(i, i) : e.value * (x(i, j) + x(j, i));
      }
      stationarity[static_cast<Index>(sdp.basis->index(t.alpha))] += acc;
    }
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(x, Eigen::EigenvaluesOnly);
    r.dual_infeasibility = std::max(r.dual_infeasibility, -es.eigenvalues().minCoeff());
  }
  for (std::size_t k = 0; k < sdp.constraints.size(); ++k) {
    const auto& c = sdp.constraints[k];
    const double nu = solution.dual_multipliers.size() > static_cast<Index>(k)
                          ? solution.dual_multipliers[static_cast<Index>(k)]
                          : 0.0;
    for (const auto& [idx, a] : c.coefficients) stationarity[static_cast<Index>(idx)] += nu * a;
    // One-sided rows need sign-consistent multipliers.
    if (c.relation == MomentRelation::LessEqual) r.dual_infeasibility = std::max(r.dual_infeasibility, nu);
    if (c.relation == MomentRelation::GreaterEqual) r.dual_infeasibility = std::max(r.dual_infeasibility, -nu);
  }
  r.dual_infeasibility = std::max(r.dual_infeasibility, stationarity.lpNorm<Eigen::Infinity>());
  r.gap = solution.dual_value - solution.primal_value;
  return r;
}

}  // namespace dstab
