// dstab: command-line front end for problem files.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "dstab/analysis.hpp"
#include "dstab/error.hpp"
#include "dstab/oracle.hpp"
#include "dstab/problem_file.hpp"

namespace {

using namespace dstab;

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitNotCertified = 2;

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

std::string num(std::complex<double> z) {
  if (z.imag() == 0.0) return num(z.real());
  return num(z.real()) + (z.imag() < 0 ? " - " : " + ") + num(std::abs(z.imag())) + "i";
}

std::string vec(const std::vector<double>& v) {
  std::string s = "(";
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + num(v[i]);
  return s + ")";
}

struct Flags {
  std::string problem;
  int tau = 0;
  int tau_max = 0;
  int grid = 101;
  std::string csv;
  double margin = -1.0;
  bool log_iterations = false;
  std::string export_sdp;
  std::uint64_t seed = 1;
  std::string param;
  std::vector<double> values;
  std::string range;
  double lo = 0.0;
  double hi = 0.0;
  double tol = 1e-3;
};

struct Context {
  ProblemFile file;
  AnalysisSettings settings;
  int tau = 0;
};

Context prepare(const Flags& f, const Parameters& params = {}) {
  Context c;
  c.file = load_problem(f.problem, params);
  c.settings = apply_options(c.file.options);
  if (f.margin >= 0.0) c.settings.margin = f.margin;
  if (f.log_iterations) c.settings.solver.log = &std::cout;
  const int tau_min = minimal_order(build_lifted(c.file.problem, c.settings.lift));
  c.tau = f.tau > 0 ? f.tau : c.file.options.tau.value_or(tau_min);
  return c;
}

void print_report(const AnalysisReport& r) {
  const auto& d = r.diagnostics;
  for (const auto& w : d.warnings) std::cout << "warning: " << w << "\n";
  std::cout << "tau                " << r.tau << "\n"
            << "moments            " << d.stats.num_moments << " (main block "
            << d.stats.moment_block_size << ", " << d.stats.block_sizes.size() << " blocks)\n"
            << "status             " << to_string(d.status) << " after " << d.iterations
            << " iterations\n"
            << "raw                " << num(r.raw_value) << "\n"
            << "dual bound         " << num(d.dual_value) << "\n"
            << "p_upper            " << num(r.p_upper) << "\n"
            << "p_lower_stability  " << num(r.p_lower_bound_on_stability) << "\n"
            << "verdict            " << to_string(r.verdict) << "\n"
            << "residuals          primal " << num(d.residuals.primal_infeasibility) << ", dual "
            << num(d.residuals.dual_infeasibility) << ", gap " << num(d.residuals.gap) << "\n";
  if (r.candidate) {
    const auto& c = *r.candidate;
    std::cout << "candidate          rho " << vec(c.rho) << ", lambda " << num(c.lambda)
              << ", support margin " << num(c.support_margin) << "\n";
  }
  std::cout << "seconds            " << num(r.seconds()) << "\n";
}

std::vector<double> grid_values(const Flags& f) {
  if (!f.values.empty()) return f.values;
  if (f.range.empty()) throw Error("sweep needs --values or --range LO:HI:COUNT");
  double lo = 0, hi = 0;
  int count = 0;
  char extra = 0;
  if (std::sscanf(f.range.c_str(), "%lf:%lf:%d%c", &lo, &hi, &count, &extra) != 3 || count < 1) {
    throw Error("--range expects LO:HI:COUNT");
  }
  std::vector<double> out;
  for (int i = 0; i < count; ++i) {
    out.push_back(count == 1 ? lo : lo + (hi - lo) * i / (count - 1));
  }
  return out;
}

ProblemFamily family_of(const Flags& f) {
  if (f.param.empty()) throw Error("--param NAME is required");
  return [f](double v) { return load_problem(f.problem, {{f.param, v}}).problem; };
}

int cmd_analyze(const Flags& f) {
  auto c = prepare(f);
  const auto r = upper_probability(c.file.problem, c.tau, c.settings);
  print_report(r);
  return r.verdict == Verdict::Inconclusive ? kExitNotCertified : kExitOk;
}

int cmd_certify(const Flags& f) {
  auto c = prepare(f);
  const auto res = certify_robust(c.file.problem, c.tau, c.settings);
  std::cout << (res.certified ? "CertifiedRobustlyDStable" : "NotCertified")
            << ", raw=" << num(res.report.raw_value) << "\n";
  print_report(res.report);
  return res.certified ? kExitOk : kExitNotCertified;
}

int cmd_hierarchy(const Flags& f) {
  auto c = prepare(f);
  const int tau_max = f.tau_max > 0 ? f.tau_max : c.file.options.tau_max.value_or(c.tau + 2);
  const auto h = hierarchy(c.file.problem, c.tau, tau_max, c.settings);
  std::cout << "tau  raw              p_upper          status        seconds\n";
  char line[256];
  for (const auto& r : h.reports) {
    std::snprintf(line, sizeof line, "%-4d %-16.9g %-16.9g %-13s %.9g\n", r.tau, r.raw_value,
                  r.p_upper, to_string(r.diagnostics.status).c_str(), r.seconds());
    std::cout << line;
  }
  for (int t : h.monotonicity_violations) {
    std::cout << "warning: value increased from tau=" << t << " to tau=" << t + 1 << "\n";
  }
  if (!f.csv.empty()) {
    std::ofstream out(f.csv);
    if (!out) throw Error("cannot write " + f.csv);
    out << "tau,raw,p_upper,p_lower,status,seconds\n";
    for (const auto& r : h.reports) {
      out << r.tau << "," << num(r.raw_value) << "," << num(r.p_upper) << ","
          << num(r.p_lower_bound_on_stability) << "," << to_string(r.diagnostics.status) << ","
          << num(r.seconds()) << "\n";
    }
  }
  return kExitOk;
}

int cmd_sweep(const Flags& f) {
  const auto grid = grid_values(f);
  auto c = prepare(f, {{f.param, grid.front()}});
  const auto points = sweep(family_of(f), grid, c.tau, c.settings);
  std::ostringstream csv;
  write_sweep_csv(csv, points);
  std::cout << csv.str();
  for (const auto& p : points) {
    if (!p.error.empty()) std::cout << "error at " << num(p.theta) << ": " << p.error << "\n";
  }
  if (!f.csv.empty()) {
    std::ofstream out(f.csv);
    if (!out) throw Error("cannot write " + f.csv);
    out << csv.str();
  }
  return kExitOk;
}

int cmd_bisect(const Flags& f) {
  auto c = prepare(f, {{f.param, f.lo}});
  const auto res = bisect_margin(family_of(f), f.lo, f.hi, c.tau, f.tol, c.settings);
  std::cout << "k*                 " << num(res.k) << "\n"
            << "steps              " << res.steps << "\n";
  print_report(res.report);
  return kExitOk;
}

int cmd_oracle(const Flags& f) {
  auto c = prepare(f);
  const auto& p = c.file.problem;
  GridOptions go;
  go.seed = f.seed;
  const auto w = grid_violation_search(p, f.grid, go);
  if (w) {
    std::cout << "witness            rho " << vec(w->rho) << ", lambda " << num(w->lambda)
              << ", depth " << num(w->min_region_residual) << ", eig residual "
              << num(w->eig_residual) << "\n";
  } else {
    std::cout << "witness            none on " << f.grid << " points per axis\n";
  }
  const auto atoms = sample_delta(p.delta(), f.grid, f.seed);
  try {
    const auto lp = atomic_lp_bound(p, atoms);
    std::cout << "lp lower bound     " << num(lp.lower_bound) << " over " << atoms.size()
              << " atoms\n";
    for (std::size_t k = 0; k < lp.atoms.size(); ++k) {
      if (lp.weights[k] > 1e-12) {
        std::cout << "  atom " << vec(lp.atoms[k]) << " weight " << num(lp.weights[k])
                  << (lp.violating[k] ? " violating" : "") << "\n";
      }
    }
  } catch (const Error& e) {
    std::cout << "lp lower bound     unavailable: " << e.what() << "\n";
  }
  return kExitOk;
}

int cmd_export(const Flags& f) {
  auto c = prepare(f);
  const auto lifted = build_lifted(c.file.problem, c.settings.lift);
  const auto sdp = assemble_relaxation(lifted, c.tau, c.settings.relaxation);
  const auto s = problem_stats(sdp);
  std::cout << "tau " << s.tau << ", variables " << s.num_vars << ", moments " << s.num_moments
            << ", main block " << s.moment_block_size << ", blocks " << s.block_sizes.size()
            << ", equalities " << s.linear_equalities << ", inequalities "
            << s.linear_inequalities << "\n";
  if (!f.export_sdp.empty()) {
    std::ofstream out(f.export_sdp);
    if (!out) throw Error("cannot write " + f.export_sdp);
    export_sdp(sdp, out);
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Robust D-stability analysis of uncertain polynomial matrices"};
  app.require_subcommand(1);
  Flags f;

  auto common = [&](CLI::App* sub) {
    sub->add_option("problem", f.problem, "Problem file")->required()->check(CLI::ExistingFile);
    sub->add_option("--tau", f.tau, "Relaxation order");
    sub->add_option("--margin", f.margin, "Certification margin");
    sub->add_flag("--log-iterations", f.log_iterations, "Print solver iterations");
  };
  auto param = [&](CLI::App* sub) {
    sub->add_option("--param", f.param, "Placeholder name substituted as ${NAME}")->required();
  };

  auto* analyze = app.add_subcommand("analyze", "Upper violation probability");
  common(analyze);
  auto* certify = app.add_subcommand("certify", "Robust D-stability certificate");
  common(certify);
  auto* hier = app.add_subcommand("hierarchy", "Solve a range of relaxation orders");
  common(hier);
  hier->add_option("--tau-max", f.tau_max, "Highest order");
  hier->add_option("--csv", f.csv, "CSV output path");
  auto* sw = app.add_subcommand("sweep", "Parameter sweep");
  common(sw);
  param(sw);
  sw->add_option("--values", f.values, "Grid values")->delimiter(',');
  sw->add_option("--range", f.range, "LO:HI:COUNT");
  sw->add_option("--csv", f.csv, "CSV output path");
  auto* bis = app.add_subcommand("bisect", "Largest certified parameter value");
  common(bis);
  param(bis);
  bis->add_option("--lo", f.lo, "Lower end (must certify)")->required();
  bis->add_option("--hi", f.hi, "Upper end")->required();
  bis->add_option("--tol", f.tol, "Bracket width");
  auto* ora = app.add_subcommand("oracle", "Grid search and atomic LP bound");
  common(ora);
  ora->add_option("--grid", f.grid, "Points per axis");
  ora->add_option("--seed", f.seed, "Seed for rejection sampling");
  auto* exp = app.add_subcommand("export-sdp", "Assemble and export the relaxation");
  common(exp);
  exp->add_option("--export-sdp", f.export_sdp, "Output path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitError;
  }

  try {
    if (analyze->parsed()) return cmd_analyze(f);
    if (certify->parsed()) return cmd_certify(f);
    if (hier->parsed()) return cmd_hierarchy(f);
    if (sw->parsed()) return cmd_sweep(f);
    if (bis->parsed()) return cmd_bisect(f);
    if (ora->parsed()) return cmd_oracle(f);
    if (exp->parsed()) return cmd_export(f);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}
