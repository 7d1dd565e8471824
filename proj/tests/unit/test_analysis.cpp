#include <doctest.h>

#include <sstream>

#include "dstab/analysis.hpp"
#include "dstab/error.hpp"
#include "fixtures.hpp"

using namespace dstab;

namespace {

DStabilityProblem with_variance(double bound) {
  auto p = fixtures::running_example(0.5);
  auto mc = p.user_moment_constraints();
  mc.push_back({fixtures::rho_poly("(rho - 0.5)^2"), MomentRelation::LessEqual, bound});
  return p.with_moment_constraints(mc);
}

}  // namespace

TEST_SUITE("analysis") {
  TEST_CASE("mean-constrained running example") {
    const auto r = upper_probability(fixtures::running_example(0.5), 2);
    CHECK(r.diagnostics.status == SolveStatus::Optimal);
    CHECK(r.p_upper == doctest::Approx(0.5).epsilon(1e-3));
    CHECK(r.p_lower_bound_on_stability == doctest::Approx(1.0 - r.p_upper));
    CHECK(r.verdict == Verdict::ViolationProbabilityBound);
    CHECK(r.diagnostics.stats.num_moments == 70);
    REQUIRE(r.candidate.has_value());
    CHECK(r.candidate->rho[0] == doctest::Approx(0.5).epsilon(1e-3));
  }

  TEST_CASE("support-only running example is violable") {
    const auto r = upper_probability(fixtures::running_example(), 2);
    CHECK(r.raw_value == doctest::Approx(1.0).epsilon(1e-3));
    CHECK(r.verdict == Verdict::Inconclusive);
    const auto c = certify_robust(fixtures::running_example(), 2);
    CHECK_FALSE(c.certified);
    REQUIRE(c.report.candidate.has_value());
    CHECK(c.report.candidate->rho[0] == doctest::Approx(1.0).epsilon(1e-3));
    CHECK(std::abs(c.report.candidate->lambda.real()) <= 1e-3);
  }

  TEST_CASE("shrunk support certifies") {
    const auto c = certify_robust(fixtures::running_example(std::nullopt, 0.0, 0.9), 2);
    CHECK(c.certified);
    CHECK(c.report.verdict == Verdict::CertifiedRobustlyDStable);
    CHECK(c.report.raw_value < 1e-3);
  }

  TEST_CASE("certification rejects moment information") {
    CHECK_THROWS_AS(certify_robust(fixtures::running_example(0.5), 2), Error);
  }

  TEST_CASE("order below the minimum is raised") {
    const auto r = upper_probability(fixtures::hurwitz(), 1);
    CHECK(r.tau == 2);
    CHECK_FALSE(r.diagnostics.warnings.empty());
    CHECK_THROWS_AS(hierarchy(fixtures::hurwitz(), 1, 2), Error);
  }

  TEST_CASE("hierarchy is nonincreasing") {
    const auto h = hierarchy(fixtures::running_example(0.5), 1, 3);
    REQUIRE(h.reports.size() == 3);
    CHECK(h.monotonicity_violations.empty());
    for (std::size_t k = 1; k < h.reports.size(); ++k) {
      CHECK(h.reports[k].raw_value <= h.reports[k - 1].raw_value + 1e-6);
    }
    CHECK(h.reports.back().raw_value == doctest::Approx(0.5).epsilon(1e-3));
  }

  TEST_CASE("constant stable matrix is never violable above the first order") {
    UncertainMatrix a({"rho"}, 2, {fixtures::rho_poly("-1"), fixtures::rho_poly("0"),
                                   fixtures::rho_poly("0"), fixtures::rho_poly("-1")});
    DStabilityProblem p(a, fixtures::interval(0.0, 1.0),
                        region_preset(RegionPreset::LeftHalfPlaneClosure));
    // At order one the eigen rows only enter through scalar localizers, which
    // cannot tie x to lre; the relaxation then reaches the trivial bound 1.
    const auto h = hierarchy(p, 1, 3);
    CHECK(h.reports[0].raw_value <= 1.0 + 1e-6);
    CHECK(h.reports[1].raw_value <= 1e-6);
    CHECK(h.reports[2].raw_value <= 1e-6);
  }

  TEST_CASE("candidate of a Dirac measure is the atom") {
    const auto l = build_lifted(fixtures::running_example());
    const auto sdp = assemble_relaxation(l, 2);
    const auto z = l.make_point(std::vector<double>{1.0}, 0.0, 0.0,
                                std::vector<double>{1.0, 0.0}, {});
    SDPSolution s;
    s.moments = relaxation_moments(sdp, {z}, std::vector<double>{1.0});
    const auto c = extract_candidate(s, sdp, l);
    CHECK(c.rho[0] == doctest::Approx(1.0));
    CHECK(c.lambda == std::complex<double>(0.0, 0.0));
    CHECK(c.x_re[0] == doctest::Approx(1.0));
    CHECK(c.x_re[1] == doctest::Approx(0.0));
    CHECK(c.x_im.empty());
    CHECK(c.support_margin >= -1e-12);
  }

  TEST_CASE("bisection on the support width") {
    ProblemFamily family = [](double k) {
      return fixtures::running_example(std::nullopt, 0.0, k);
    };
    const auto b = bisect_margin(family, 0.5, 1.2, 2, 0.01);
    CHECK(b.k <= 1.0);
    CHECK(b.k >= 0.98);
    CHECK(b.report.verdict == Verdict::CertifiedRobustlyDStable);
    const auto both = bisect_margin(family, 0.2, 0.4, 2, 0.01);
    CHECK(both.k == 0.4);
    CHECK_THROWS_AS(bisect_margin(family, 1.0, 1.2, 2, 0.01), Error);
  }

  TEST_CASE("variance sweep") {
    const std::vector<double> grid = {0.0, 0.1, 0.25};
    const auto pts = sweep(with_variance, grid, 2);
    REQUIRE(pts.size() == 3);
    for (const auto& p : pts) REQUIRE(p.report.has_value());
    CHECK(pts[0].report->p_upper <= 1e-3);
    CHECK(pts[1].report->p_upper <= pts[2].report->p_upper + 1e-6);
    CHECK(pts[2].report->p_upper == doctest::Approx(0.5).epsilon(1e-3));

    std::ostringstream csv;
    write_sweep_csv(csv, pts);
    std::istringstream in(csv.str());
    std::string line;
    std::getline(in, line);
    CHECK(line == "theta,p_upper,p_lower,status,tau,seconds");
    int rows = 0;
    while (std::getline(in, line)) {
      ++rows;
      CHECK(std::count(line.begin(), line.end(), ',') == 5);
    }
    CHECK(rows == 3);
  }

  TEST_CASE("sweep records failures per point") {
    ProblemFamily family = [](double k) {
      if (k > 1.0) throw Error("bad parameter");
      return fixtures::running_example(k);
    };
    const auto pts = sweep(family, {0.5, 2.0}, 2);
    CHECK(pts[0].report.has_value());
    CHECK_FALSE(pts[1].report.has_value());
    CHECK(pts[1].error.find("bad parameter") != std::string::npos);
  }
}
