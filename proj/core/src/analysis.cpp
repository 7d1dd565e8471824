#include "dstab/analysis.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ostream>

namespace dstab {

std::string to_string(Verdict verdict) {
  switch (verdict) {
    case Verdict::CertifiedRobustlyDStable:
      return "CertifiedRobustlyDStable";
    case Verdict::ViolationProbabilityBound:
      return "ViolationProbabilityBound";
    case Verdict::Inconclusive:
      return "Inconclusive";
  }
  return "Unknown";
}

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

}  // namespace

Candidate extract_candidate(const SDPSolution& solution, const SDPProblem& sdp,
                            const LiftedProblem& lifted) {
  const std::size_t nz = lifted.num_vars();
  if (sdp.num_vars != nz) throw Error("extract_candidate: relaxation does not match problem");
  Candidate c;
  c.z.resize(nz);
  for (std::size_t i = 0; i < nz; ++i) {
    Exponent e(nz, 0);
    e[i] = 1;
    c.z[i] = solution.moments(e) * sdp.variable_scale[i];
  }
  c.rho.assign(c.z.begin(), c.z.begin() + static_cast<std::ptrdiff_t>(lifted.num_params));
  const auto im = lifted.lambda_im_index();
  c.lambda = {c.z[lifted.lambda_re_index()], im ? c.z[*im] : 0.0};
  for (std::size_t i = 0; i < lifted.matrix_size; ++i) {
    c.x_re.push_back(c.z[lifted.x_re_index(i)]);
    if (auto k = lifted.x_im_index(i)) c.x_im.push_back(c.z[*k]);
  }
  c.support_margin = membership_margin(lifted.support, c.z);
  return c;
}

AnalysisReport upper_probability(const DStabilityProblem& problem, int tau,
                                 const AnalysisSettings& settings) {
  AnalysisReport report;
  auto t0 = Clock::now();
  const LiftedProblem lifted = build_lifted(problem, settings.lift);
  const int tau_min = minimal_order(lifted);
  if (tau < tau_min) {
    report.diagnostics.warnings.push_back("order " + std::to_string(tau) +
                                          " raised to the minimal order " +
                                          std::to_string(tau_min));
    tau = tau_min;
  }
  report.tau = tau;
  const SDPProblem sdp = assemble_relaxation(lifted, tau, settings.relaxation);
  report.diagnostics.stats = problem_stats(sdp);
  report.diagnostics.assemble_seconds = since(t0);

  t0 = Clock::now();
  const SDPSolution sol = solve(sdp, settings.solver);
  report.diagnostics.solve_seconds = since(t0);
  report.diagnostics.status = sol.status;
  report.diagnostics.residuals = sol.residuals;
  report.diagnostics.iterations = sol.iterations;
  report.diagnostics.dual_value = sol.dual_value;

  report.raw_value = sol.primal_value;
  report.p_upper = std::clamp(report.raw_value, 0.0, 1.0);
  report.p_lower_bound_on_stability = 1.0 - report.p_upper;

  if (sol.status != SolveStatus::Optimal) {
    report.verdict = Verdict::Inconclusive;
    report.diagnostics.warnings.push_back("solver finished with status " +
                                          to_string(sol.status));
  } else if (problem.support_only()) {
    // The dual value bounds the relaxation from above; require both to clear
    // the margin.
    const double bound = std::max(sol.primal_value, sol.dual_value);
    report.verdict = bound < 1.0 - settings.margin ? Verdict::CertifiedRobustlyDStable
                                                   : Verdict::Inconclusive;
  } else {
    report.verdict = Verdict::ViolationProbabilityBound;
  }
  if (sol.status == SolveStatus::Optimal || sol.status == SolveStatus::SlowProgress ||
      sol.status == SolveStatus::IterLimit) {
    report.candidate = extract_candidate(sol, sdp, lifted);
  }
  return report;
}

CertificationResult certify_robust(const DStabilityProblem& problem, int tau,
                                   const AnalysisSettings& settings) {
  if (!problem.support_only()) {
    throw Error("certify_robust requires a problem without moment constraints");
  }
  CertificationResult result;
  result.report = upper_probability(problem, tau, settings);
  result.certified = result.report.verdict == Verdict::CertifiedRobustlyDStable;
  return result;
}

HierarchyReport hierarchy(const DStabilityProblem& problem, int tau_min, int tau_max,
                          const AnalysisSettings& settings) {
  const int lowest = minimal_order(build_lifted(problem, settings.lift));
  if (tau_min < lowest) {
    throw Error("hierarchy: tau_min " + std::to_string(tau_min) +
                " is below the minimal order " + std::to_string(lowest));
  }
  if (tau_max < tau_min) throw Error("hierarchy: tau_max is below tau_min");
  HierarchyReport h;
  for (int tau = tau_min; tau <= tau_max; ++tau) {
    h.reports.push_back(upper_probability(problem, tau, settings));
  }
  for (std::size_t i = 0; i + 1 < h.reports.size(); ++i) {
    if (h.reports[i + 1].raw_value > h.reports[i].raw_value + 1e-6) {
      h.monotonicity_violations.push_back(h.reports[i].tau);
    }
  }
  return h;
}

BisectionResult bisect_margin(const ProblemFamily& family, double k_lo, double k_hi, int tau,
                              double tol, const AnalysisSettings& settings) {
  if (!(tol > 0.0)) throw Error("bisect_margin: tolerance must be positive");
  if (!(k_lo < k_hi)) throw Error("bisect_margin: need k_lo < k_hi");
  BisectionResult result;
  auto lo = certify_robust(family(k_lo), tau, settings);
  if (!lo.certified) throw Error("bisect_margin: the family does not certify at k_lo");
  auto hi = certify_robust(family(k_hi), tau, settings);
  if (hi.certified) {
    result.k = k_hi;
    result.report = std::move(hi.report);
    return result;
  }
  result.report = std::move(lo.report);
  while (k_hi - k_lo > tol) {
    const double mid = 0.5 * (k_lo + k_hi);
    auto c = certify_robust(family(mid), tau, settings);
    ++result.steps;
    if (c.certified) {
      k_lo = mid;
      result.report = std::move(c.report);
    } else {
      k_hi = mid;
    }
  }
  result.k = k_lo;
  return result;
}

std::vector<SweepPoint> sweep(const ProblemFamily& family, const std::vector<double>& grid,
                              int tau, const AnalysisSettings& settings) {
  if (grid.empty()) throw Error("sweep: empty grid");
  std::vector<SweepPoint> out;
  for (double theta : grid) {
    SweepPoint p;
    p.theta = theta;
    try {
      p.report = upper_probability(family(theta), tau, settings);
    } catch (const std::exception& e) {
      p.error = e.what();
    }
    out.push_back(std::move(p));
  }
  return out;
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepPoint>& points) {
  out << "theta,p_upper,p_lower,status,tau,seconds\n";
  char buf[256];
  for (const auto& p : points) {
    if (p.report) {
      const auto& r = *p.report;
      std::snprintf(buf, sizeof buf, "%.9g,%.9g,%.9g,%s,%d,%.9g\n", p.theta, r.p_upper,
                    r.p_lower_bound_on_stability, to_string(r.diagnostics.status).c_str(), r.tau,
                    r.seconds());
    } else {
      std::snprintf(buf, sizeof buf, "%.9g,,,Error,,\n", p.theta);
    }
    out << buf;
  }
}

}  // namespace dstab
