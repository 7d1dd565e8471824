#include <doctest.h>

#include "dstab/error.hpp"
#include "dstab/relax.hpp"
#include "dstab/sdp.hpp"
#include "fixtures.hpp"

using namespace dstab;

namespace {

// maximize m1 s.t. m0 = 1, [[m0, m1], [m1, m2]] >= 0, 1 - m2 >= 0.
SDPProblem hankel_problem() {
  SDPProblem p;
  p.tau = 1;
  p.num_vars = 1;
  p.basis = std::make_shared<MonomialBasis>(monomial_basis(1, 2));
  p.objective = Eigen::Vector3d(0.0, 1.0, 0.0);
  p.constraints.push_back({{{0, 1.0}}, MomentRelation::Equal, 1.0, "mass"});
  p.blocks.push_back({std::make_shared<LinearMatrixForm>(moment_matrix_form(1, 1)), "moment"});
  const auto q = Polynomial::constant(1, 1.0) - Polynomial::variable(1, 0).pow(2);
  p.blocks.push_back({std::make_shared<LinearMatrixForm>(localizing_matrix_form(q, 1, 0)), "ball"});
  p.variable_scale = {1.0};
  p.variable_names = {"z"};
  return p;
}

SDPProblem running(std::optional<double> mean) {
  return assemble_relaxation(build_lifted(fixtures::running_example(mean)), 2);
}

void check_duality(const SDPSolution& s) {
  REQUIRE(s.status == SolveStatus::Optimal);
  const double gap = s.dual_value - s.primal_value;
  CHECK(gap >= -1e-6);
  CHECK(gap <= 1e-4);
}

}  // namespace

TEST_SUITE("sdp") {
  TEST_CASE("one-variable Hankel problem") {
    const auto p = hankel_problem();
    const auto s = solve(p);
    check_duality(s);
    CHECK(s.primal_value == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(s.moments({1}) == doctest::Approx(1.0).epsilon(1e-5));
    CHECK(s.dual_blocks.size() == 2);
    CHECK(s.dual_multipliers.size() == 1);
  }

  TEST_CASE("running example values") {
    const auto mean = solve(running(0.5));
    check_duality(mean);
    CHECK(mean.primal_value == doctest::Approx(0.5).epsilon(1e-4));
    const auto det = solve(running(std::nullopt));
    check_duality(det);
    CHECK(det.primal_value == doctest::Approx(1.0).epsilon(1e-4));
  }

  TEST_CASE("optimal solutions meet the tolerances") {
    const auto p = running(0.5);
    SolverSettings st;
    const auto s = solve(p, st);
    REQUIRE(s.status == SolveStatus::Optimal);
    const auto r = residuals(p, s);
    CHECK(r.primal_infeasibility <= 10 * st.feasibility_tolerance);
    CHECK(r.dual_infeasibility <= 10 * st.feasibility_tolerance);
    CHECK(std::abs(r.gap) <= 10 * st.gap_tolerance * (1 + std::abs(s.primal_value)));
  }

  TEST_CASE("infeasible mean") {
    const auto s = solve(running(2.0));
    CHECK(s.status == SolveStatus::Infeasible);
    CHECK(s.certificate.has_value());
  }

  TEST_CASE("feasibility of atomic moments and sensitivity") {
    const auto p = running(0.5);
    const std::vector<std::vector<double>> atoms = {{0.0, 0.0, 0.0, 0.0}, {1.0, 0.0, 1.0, 0.0}};
    const auto m = relaxation_moments(p, atoms, std::vector<double>{0.5, 0.5});
    CHECK(primal_infeasibility(p, m) <= 1e-8);
    for (double e : block_min_eigenvalues(p, m)) CHECK(e >= -1e-10);

    Eigen::VectorXd v = m.values();
    v[p.basis->index({1, 0, 0, 0})] += 1e-3;
    CHECK(primal_infeasibility(p, MomentVector(m.shared_basis(), v)) >= 1e-4);
  }

  TEST_CASE("deterministic") {
    const auto p = running(0.5);
    const auto a = solve(p), b = solve(p);
    CHECK(a.iterations == b.iterations);
    CHECK(a.primal_value == b.primal_value);
    CHECK(a.moments.values() == b.moments.values());
  }

  TEST_CASE("both equality encodings agree") {
    RelaxationOptions zero;
    zero.equality_encoding = EqualityEncoding::ZeroLocalizing;
    const auto l = build_lifted(fixtures::running_example(0.5));
    const auto a = solve(assemble_relaxation(l, 2));
    const auto b = solve(assemble_relaxation(l, 2, zero));
    check_duality(a);
    check_duality(b);
    CHECK(a.primal_value == doctest::Approx(b.primal_value).epsilon(1e-5));
  }

  TEST_CASE("kernel restriction keeps the value") {
    auto p = assemble_relaxation(build_lifted(fixtures::running_example(0.5)), 3);
    const auto reduced = solve(p);
    for (auto& b : p.blocks) b.kernel.resize(0, 0);
    const auto full = solve(p);
    check_duality(reduced);
    CHECK(reduced.primal_value == doctest::Approx(0.5).epsilon(1e-6));
    CHECK(full.primal_value == doctest::Approx(0.5).epsilon(1e-3));
    // Dual blocks come back in the original coordinates.
    CHECK(reduced.dual_blocks[0].rows() == 35);
    CHECK(reduced.residuals.dual_infeasibility <= 1e-5);
  }

  TEST_CASE("iteration limit") {
    SolverSettings st;
    st.max_iterations = 2;
    const auto s = solve(running(0.5), st);
    CHECK(s.status == SolveStatus::IterLimit);
    CHECK(s.iterations <= 2);
  }

  TEST_CASE("settings validation") {
    SolverSettings st;
    st.step_fraction = 1.5;
    CHECK_THROWS_AS(st.validate(), Error);
    st = {};
    st.max_iterations = 0;
    CHECK_THROWS_AS(solve(hankel_problem(), st), Error);
  }
}
