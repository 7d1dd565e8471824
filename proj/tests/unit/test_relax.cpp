#include <doctest.h>

#include <sstream>

#include "dstab/error.hpp"
#include "dstab/relax.hpp"
#include "fixtures.hpp"

using namespace dstab;

TEST_SUITE("relax") {
  TEST_CASE("running example with mean") {
    const auto l = build_lifted(fixtures::running_example(0.5));
    const auto sdp = assemble_relaxation(l, 2);
    CHECK(sdp.num_moments() == 70);
    const auto& b = *sdp.basis;
    CHECK(sdp.objective[b.index({0, 0, 2, 0})] == 1.0);
    CHECK(sdp.objective[b.index({0, 0, 0, 2})] == 1.0);
    CHECK(sdp.objective.cwiseAbs().sum() == 2.0);

    REQUIRE(sdp.constraints.size() == 2);
    const auto& norm = sdp.constraints[sdp.normalization_index];
    REQUIRE(norm.coefficients.size() == 1);
    CHECK(norm.coefficients[0].first == 0);
    CHECK(norm.rhs == 1.0);
    const auto& mean = sdp.constraints[1];
    REQUIRE(mean.coefficients.size() == 1);
    CHECK(mean.coefficients[0].first == b.index({1, 0, 0, 0}));
    CHECK(mean.rhs == doctest::Approx(0.5));

    const auto s = problem_stats(sdp);
    CHECK(s.moment_block_size == 15);
    CHECK(s.num_vars == 4);
    // moment matrix, delta (2), D^c, eigen rows as pairs (4), ball, disk
    CHECK(s.block_sizes.size() == 10);
    CHECK(s.linear_equalities == 2);
  }

  TEST_CASE("structural kernels vanish on the support") {
    const auto sdp = assemble_relaxation(build_lifted(fixtures::running_example(0.5)), 3);
    REQUIRE(sdp.blocks[0].kernel.cols() > 0);
    CHECK(sdp.blocks[0].kernel.rows() == 35);
    const std::vector<std::vector<double>> atoms = {{0.0, 0.0, 0.0, 0.0}, {1.0, 0.0, 1.0, 0.0}};
    const auto m = relaxation_moments(sdp, atoms, std::vector<double>{0.5, 0.5});
    std::size_t with_kernel = 0;
    for (const auto& b : sdp.blocks) {
      if (b.kernel.cols() == 0) continue;
      ++with_kernel;
      const Eigen::MatrixXd v = assemble(*b.form, m);
      CHECK((v * b.kernel).cwiseAbs().maxCoeff() <= 1e-12);
    }
    CHECK(with_kernel > 1);
    // Equality pairs are handled as rows, not restricted.
    for (const auto& b : sdp.blocks) {
      if (b.label.back() == '+' || b.label.back() == '-') CHECK(b.kernel.cols() == 0);
    }
  }

  TEST_CASE("support-only drops the mean row") {
    const auto sdp = assemble_relaxation(build_lifted(fixtures::running_example()), 2);
    REQUIRE(sdp.constraints.size() == 1);
    CHECK(sdp.constraints[0].rhs == 1.0);
  }

  TEST_CASE("zero-localizing encoding") {
    RelaxationOptions o;
    o.equality_encoding = EqualityEncoding::ZeroLocalizing;
    const auto sdp = assemble_relaxation(build_lifted(fixtures::running_example()), 2, o);
    const auto s = problem_stats(sdp);
    CHECK(s.block_sizes.size() == 6);
    CHECK(s.linear_equalities > 1);
  }

  TEST_CASE("sizes") {
    const auto h = assemble_relaxation(build_lifted(fixtures::hurwitz()), 3);
    CHECK(h.num_moments() == 1716);
    CHECK(problem_stats(h).moment_block_size == 120);

    LiftedProblem tiny;
    tiny.z_vars = {"z"};
    tiny.support = SemialgebraicSet({"z"});
    tiny.objective = Polynomial::variable(1, 0);
    tiny.moment_constraints = {{Polynomial::constant(1, 1.0), MomentRelation::Equal, 1.0}};
    tiny.coordinate_scale = {1.0};
    const auto t = assemble_relaxation(tiny, 1);
    CHECK(t.num_moments() == 3);
    CHECK(problem_stats(t).moment_block_size == 2);
  }

  TEST_CASE("order below the minimum is rejected") {
    CHECK_THROWS_AS(assemble_relaxation(build_lifted(fixtures::hurwitz()), 1), Error);
  }

  TEST_CASE("scaling maps points into the unit box") {
    const auto l = build_lifted(fixtures::hurwitz());
    const auto sdp = assemble_relaxation(l, 2);
    REQUIRE(sdp.variable_scale.size() == 7);
    CHECK(sdp.variable_scale[0] == doctest::Approx(3.4));
    CHECK(sdp.variable_scale[1] == doctest::Approx(l.lambda_radius));
    const auto z = l.make_point(std::vector<double>{3.4}, -l.lambda_radius, 0.0,
                                std::vector<double>{1.0, 0.0}, std::vector<double>{0.0, 0.0});
    const auto y = to_relaxation_coordinates(sdp, z);
    for (double v : y) CHECK(std::abs(v) <= 1.0 + 1e-12);

    RelaxationOptions raw;
    raw.scale_variables = false;
    const auto unscaled = assemble_relaxation(l, 2, raw);
    for (double s : unscaled.variable_scale) CHECK(s == 1.0);
  }

  TEST_CASE("export format") {
    const auto sdp = assemble_relaxation(build_lifted(fixtures::running_example(0.5)), 2);
    std::ostringstream out;
    export_sdp(sdp, out);
    std::istringstream in(out.str());
    std::string line;
    std::getline(in, line);
    CHECK(line == "dstab-sdp 1");
    std::getline(in, line);
    CHECK(line == "vars 4 tau 2 moments 70");
    int moments = 0, blocks = 0, linear = 0;
    while (std::getline(in, line)) {
      if (line.rfind("moment ", 0) == 0) ++moments;
      if (line.rfind("block ", 0) == 0) ++blocks;
      if (line.rfind("linear ", 0) == 0) ++linear;
    }
    CHECK(moments == 70);
    CHECK(blocks == 10);
    CHECK(linear == 2);
  }
}
