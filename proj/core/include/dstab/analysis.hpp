#pragma once

// Driver layer: relaxation hierarchy, probability reports, certification,
// candidate extraction, bisection and sweeps.

#include <complex>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "dstab/problem.hpp"
#include "dstab/relax.hpp"
#include "dstab/sdp.hpp"

namespace dstab {

enum class Verdict { CertifiedRobustlyDStable, ViolationProbabilityBound, Inconclusive };
std::string to_string(Verdict verdict);

/// Heuristic minimizer estimate read from first-order moments.
struct Candidate {
  std::vector<double> rho;
  std::complex<double> lambda;
  std::vector<double> x_re;
  std::vector<double> x_im;  // empty in real mode
  /// The estimate as a lifted point.
  std::vector<double> z;
  /// Signed depth in the lifted support set (negative means outside).
  double support_margin = 0.0;
};

struct AnalysisSettings {
  double margin = 1e-3;
  SolverSettings solver;
  RelaxationOptions relaxation;
  LiftOptions lift;
};

struct Diagnostics {
  SolveStatus status = SolveStatus::IterLimit;
  Residuals residuals;
  int iterations = 0;
  double dual_value = 0.0;
  double assemble_seconds = 0.0;
  double solve_seconds = 0.0;
  ProblemStats stats;
  std::vector<std::string> warnings;
};

struct AnalysisReport {
  int tau = 0;
  /// raw_value clipped to [0, 1].
  double p_upper = 1.0;
  double raw_value = 1.0;
  /// 1 - p_upper.
  double p_lower_bound_on_stability = 0.0;
  Verdict verdict = Verdict::Inconclusive;
  std::optional<Candidate> candidate;
  Diagnostics diagnostics;

  double seconds() const { return diagnostics.assemble_seconds + diagnostics.solve_seconds; }
};

/// Solves the order-tau relaxation. Orders below the minimum are raised with
/// a warning recorded in the diagnostics.
AnalysisReport upper_probability(const DStabilityProblem& problem, int tau,
                                 const AnalysisSettings& settings = {});

struct CertificationResult {
  bool certified = false;
  AnalysisReport report;
};

/// Support-only certification: certified iff the relaxation value is below
/// 1 - margin. Throws when the problem carries moment constraints.
CertificationResult certify_robust(const DStabilityProblem& problem, int tau,
                                   const AnalysisSettings& settings = {});

struct HierarchyReport {
  std::vector<AnalysisReport> reports;
  /// Orders tau at which raw(tau + 1) > raw(tau) + 1e-6.
  std::vector<int> monotonicity_violations;
};

HierarchyReport hierarchy(const DStabilityProblem& problem, int tau_min, int tau_max,
                          const AnalysisSettings& settings = {});

/// First-order moments mapped back to the lifted coordinates.
Candidate extract_candidate(const SDPSolution& solution, const SDPProblem& sdp,
                            const LiftedProblem& lifted);

using ProblemFamily = std::function<DStabilityProblem(double)>;

struct BisectionResult {
  double k = 0.0;
  int steps = 0;
  /// Report at the returned k.
  AnalysisReport report;
};

/// Largest k in [k_lo, k_hi] (within tol) at which the family certifies.
/// Certification is assumed monotone in k. Throws if k_lo does not certify.
BisectionResult bisect_margin(const ProblemFamily& family, double k_lo, double k_hi, int tau,
                              double tol, const AnalysisSettings& settings = {});

struct SweepPoint {
  double theta = 0.0;
  std::optional<AnalysisReport> report;
  std::string error;
};

std::vector<SweepPoint> sweep(const ProblemFamily& family, const std::vector<double>& grid,
                              int tau, const AnalysisSettings& settings = {});

/// Header theta,p_upper,p_lower,status,tau,seconds; one row per grid point.
void write_sweep_csv(std::ostream& out, const std::vector<SweepPoint>& points);

}  // namespace dstab
