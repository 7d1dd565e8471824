#include <doctest.h>

#include <filesystem>

#include "dstab/error.hpp"
#include "dstab/problem_file.hpp"
#include "fixtures.hpp"

using namespace dstab;

namespace {

std::string problem_path(const std::string& name) {
  return std::string(DSTAB_PROBLEMS_DIR) + "/" + name;
}

}  // namespace

TEST_SUITE("problem_file") {
  TEST_CASE("running example files") {
    const auto f = load_problem(problem_path("running_example.txt"));
    CHECK(f.problem == fixtures::running_example(0.5));
    CHECK(f.options.tau == 2);
    const auto s = load_problem(problem_path("running_example_support.txt"));
    CHECK(s.problem == fixtures::running_example());
    CHECK(s.problem.support_only());
  }

  TEST_CASE("variance placeholder") {
    const auto f = load_problem(problem_path("running_example_variance.txt"), {{"VAR", 0.01}});
    const auto& mc = f.problem.user_moment_constraints();
    REQUIRE(mc.size() == 2);
    CHECK(mc[1].relation == MomentRelation::LessEqual);
    CHECK(mc[1].target == 0.01);
    CHECK(mc[1].f == fixtures::rho_poly("(rho - 0.5)^2"));
    CHECK_THROWS_AS(load_problem(problem_path("running_example_variance.txt")), ParseError);
  }

  TEST_CASE("every shipped problem round-trips") {
    const Parameters params = {{"K", 0.5}, {"VAR", 0.1}};
    for (const auto& entry : std::filesystem::directory_iterator(DSTAB_PROBLEMS_DIR)) {
      CAPTURE(entry.path().string());
      const auto f = load_problem(entry.path().string(), params);
      const auto again = parse_problem(format_problem(f));
      CHECK(again == f);
    }
  }

  TEST_CASE("Hurwitz file") {
    const auto f = load_problem(problem_path("hurwitz.txt"));
    CHECK(f.problem == fixtures::hurwitz());
    CHECK(f.explicit_eigen_space);
  }

  TEST_CASE("bifurcation file carries the slack equalities") {
    const auto f = load_problem(problem_path("bifurcation.txt"), {{"K", 0.465}});
    int equalities = 0;
    for (const auto& c : f.problem.delta().constraints()) {
      if (c.relation == Relation::EqualZero) ++equalities;
    }
    CHECK(equalities == 2);
    CHECK(f.problem.delta().dimension() == 5);
    CHECK_FALSE(is_box(f.problem.delta()));
  }

  TEST_CASE("parse errors report lines") {
    const std::string text =
        "[variables]\nrho\n[matrix]\n1\nrho +\n[delta]\nrho in [0, 1]\n";
    try {
      parse_problem(text);
      FAIL("expected a parse error");
    } catch (const ParseError& e) {
      CHECK(e.line() == 5);
    }
    CHECK_THROWS_AS(parse_problem("[variables]\nrho\n[matrix]\n2\nrho\n[delta]\nrho in [0,1]\n"),
                    Error);
    CHECK_THROWS_AS(parse_problem("[variables]\nrho\n[matrix]\n1\nrho\n[delta]\nrho in [0,1]\n"
                                  "[region]\nnowhere\n"),
                    Error);
    CHECK_THROWS_AS(parse_problem("[variables]\nrho\n[matrix]\n1\nrho\n"), Error);
    CHECK_THROWS_AS(load_problem(problem_path("missing.txt")), Error);
  }

  TEST_CASE("custom regions and options") {
    const std::string text =
        "[variables]\nrho\n[matrix]\n1\nrho\n[delta]\nrho in [0, 1]\nrho^2 <= 0.5\n"
        "[region]\nlre + 0.5 >= 0\n[options]\ntau = 3\nmargin = 0.01\nequality_encoding = zero\n"
        "max_iterations = 50\n";
    const auto f = parse_problem(text);
    CHECK(f.problem.region_complement().set.constraints().size() == 1);
    CHECK(f.problem.delta().constraints().size() == 3);
    const auto s = apply_options(f.options);
    CHECK(s.margin == 0.01);
    CHECK(s.solver.max_iterations == 50);
    CHECK(s.relaxation.equality_encoding == EqualityEncoding::ZeroLocalizing);
    CHECK(f.options.tau == 3);
    CHECK(parse_problem(format_problem(f)) == f);
  }

  TEST_CASE("placeholder substitution") {
    CHECK(substitute_parameters("a ${X} b", {{"X", 2.0}}) == "a (2) b");
    CHECK_THROWS_AS(substitute_parameters("${Y}", {{"X", 2.0}}), ParseError);
  }
}
