#pragma once

// Sectioned plain-text problem files.
//
//   # comment
//   [variables]
//   rho
//   [matrix]
//   2
//   rho - 1, 0
//   0, -1
//   [delta]
//   rho in [0, 1]
//   [region]
//   left_half_plane_closure
//   [moments]
//   E[rho] = 0.5
//   [options]
//   tau = 2
//
// [delta] lines are "v in [lo, hi]" or "lhs (>=|<=|=) rhs". [region] holds a
// preset name or constraint lines over lre and lim. ${NAME} placeholders are
// replaced from the parameter map before parsing.

#include <map>
#include <optional>
#include <string>

#include "dstab/analysis.hpp"
#include "dstab/problem.hpp"
#include "dstab/relax.hpp"

namespace dstab {

struct ProblemOptions {
  std::optional<int> tau;
  std::optional<int> tau_max;
  std::optional<double> margin;
  std::optional<double> feasibility_tolerance;
  std::optional<double> gap_tolerance;
  std::optional<int> max_iterations;
  std::optional<EqualityEncoding> equality_encoding;
  std::optional<double> lambda_radius;
  std::optional<bool> scale_variables;

  bool operator==(const ProblemOptions&) const = default;
};

struct ProblemFile {
  DStabilityProblem problem;
  ProblemOptions options;
  /// Whether [options] fixed the eigen space explicitly.
  bool explicit_eigen_space = false;

  bool operator==(const ProblemFile&) const = default;
};

using Parameters = std::map<std::string, double>;

/// Replaces ${NAME} placeholders. Unknown names raise ParseError.
std::string substitute_parameters(const std::string& text, const Parameters& params);

ProblemFile parse_problem(const std::string& text, const Parameters& params = {});
ProblemFile load_problem(const std::string& path, const Parameters& params = {});

std::string format_problem(const ProblemFile& file);
void save_problem(const std::string& path, const ProblemFile& file);

/// Applies file options on top of the given settings.
AnalysisSettings apply_options(const ProblemOptions& options, AnalysisSettings settings = {});

}  // namespace dstab
