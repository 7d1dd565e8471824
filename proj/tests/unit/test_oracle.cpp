#include <doctest.h>

#include <algorithm>
#include <random>

#include "dstab/error.hpp"
#include "dstab/oracle.hpp"
#include "dstab/simplex.hpp"
#include "fixtures.hpp"

using namespace dstab;

namespace {

std::vector<std::vector<double>> atoms_1d(std::initializer_list<double> values) {
  std::vector<std::vector<double>> out;
  for (double v : values) out.push_back({v});
  return out;
}

double sum(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s;
}

}  // namespace

TEST_SUITE("oracle") {
  TEST_CASE("small spectra") {
    const auto p = fixtures::running_example();
    const double one[1] = {1.0};
    const auto ev = eigenvalues(p.matrix().evaluate(one));
    REQUIRE(ev.size() == 2);
    CHECK(std::abs(ev[0]) <= 1e-14);
    CHECK(ev[1] == std::complex<double>(-1.0, 0.0));

    for (const auto& e : eigenvalues(Eigen::Matrix3d::Identity())) {
      CHECK(std::abs(e - 1.0) <= 1e-14);
    }

    Eigen::Matrix2d companion;
    companion << 0, 1, -0.96, -5.3;
    const auto r = eigenvalues(companion);
    const double d = std::sqrt(5.3 * 5.3 - 4 * 0.96);
    CHECK(r[0].real() == doctest::Approx((-5.3 + d) / 2));
    CHECK(r[1].real() == doctest::Approx((-5.3 - d) / 2));
    CHECK(r[0].real() < 0.0);
    CHECK(r[0].imag() == 0.0);
  }

  TEST_CASE("complex pairs are ordered by imaginary part") {
    Eigen::Matrix2d rot;
    rot << 0, -2, 2, 0;
    const auto ev = eigenvalues(rot);
    CHECK(ev[0].imag() == doctest::Approx(2.0));
    CHECK(ev[1].imag() == doctest::Approx(-2.0));
  }

  TEST_CASE("backward stability on random matrices") {
    std::mt19937_64 rng(5);
    std::normal_distribution<double> g;
    for (int n = 1; n <= 16; ++n) {
      for (int trial = 0; trial < 3; ++trial) {
        Eigen::MatrixXd m(n, n);
        for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = g(rng);
        const auto pairs = eigenpairs(m);
        REQUIRE(pairs.size() == static_cast<std::size_t>(n));
        const double norm = m.norm();
        for (const auto& p : pairs) {
          const Eigen::VectorXcd r = m.cast<std::complex<double>>() * p.vector - p.value * p.vector;
          CHECK(r.norm() / norm <= 1e-8);
          CHECK(p.vector.norm() == doctest::Approx(1.0));
        }
        for (std::size_t k = 1; k < pairs.size(); ++k) {
          CHECK(pairs[k].value.real() <= pairs[k - 1].value.real() + 1e-12);
        }
        // Trace is the eigenvalue sum.
        std::complex<double> s = 0.0;
        for (const auto& p : pairs) s += p.value;
        CHECK(s.real() == doctest::Approx(m.trace()).epsilon(1e-9).scale(norm));
      }
    }
  }

  TEST_CASE("grid witness for the running example") {
    const auto w = grid_violation_search(fixtures::running_example(), 101);
    REQUIRE(w.has_value());
    CHECK(w->rho[0] == 1.0);
    CHECK(std::abs(w->lambda) <= 1e-12);
    CHECK(w->eig_residual <= 1e-8);
    const double z[2] = {w->lambda.real(), w->lambda.imag()};
    CHECK(contains(fixtures::running_example().region_complement().set, z, 1e-6));
    CHECK_FALSE(grid_violation_search(fixtures::running_example(std::nullopt, 0.0, 0.9), 101));
  }

  TEST_CASE("Hurwitz example has no witness") {
    CHECK_FALSE(grid_violation_search(fixtures::hurwitz(), 1001).has_value());
    const auto scan = max_real_part(fixtures::hurwitz(), 1001);
    CHECK(scan.points == 1001);
    CHECK(scan.max_real_part < 0.0);
  }

  TEST_CASE("abscissa of the shrunk running example") {
    const auto scan = max_real_part(fixtures::running_example(std::nullopt, 0.0, 0.9), 10000);
    CHECK(scan.max_real_part == doctest::Approx(-0.1).epsilon(1e-9));
    CHECK(scan.rho[0] == 0.9);
  }

  TEST_CASE("sampling") {
    const auto box = sample_delta(fixtures::interval(0.0, 1.0), 5);
    REQUIRE(box.size() == 5);
    CHECK(box.front()[0] == 0.0);
    CHECK(box.back()[0] == 1.0);

    const auto x = Polynomial::variable(2, 0), y = Polynomial::variable(2, 1);
    SemialgebraicSet disk({"a", "b"}, {{x + 1.0, Relation::GreaterEqualZero},
                                       {-x + 1.0, Relation::GreaterEqualZero},
                                       {y + 1.0, Relation::GreaterEqualZero},
                                       {-y + 1.0, Relation::GreaterEqualZero},
                                       {-(x * x) - y * y + 1.0, Relation::GreaterEqualZero}});
    const auto a = sample_delta(disk, 30, 9);
    const auto b = sample_delta(disk, 30, 9);
    CHECK(a == b);
    CHECK(a.size() < 900);
    CHECK(a.size() > 600);
    for (const auto& p : a) CHECK(contains(disk, p));
    CHECK_THROWS_AS(sample_delta(SemialgebraicSet({"a"}), 3), Error);
  }

  TEST_CASE("atomic LP bounds") {
    const auto mean = fixtures::running_example(0.5);
    const auto lp = atomic_lp_bound(mean, atoms_1d({0.0, 0.5, 1.0}));
    CHECK(lp.lower_bound == doctest::Approx(0.5));
    CHECK(lp.weights[0] == doctest::Approx(0.5));
    CHECK(lp.weights[1] == doctest::Approx(0.0));
    CHECK(lp.weights[2] == doctest::Approx(0.5));
    CHECK(lp.violating == std::vector<bool>{false, false, true});
    CHECK(sum(lp.weights) == doctest::Approx(1.0).epsilon(1e-10));

    CHECK(atomic_lp_bound(fixtures::running_example(), atoms_1d({0.0, 1.0})).lower_bound ==
          doctest::Approx(1.0));
    CHECK(atomic_lp_bound(mean, atoms_1d({0.5})).lower_bound == 0.0);
    CHECK_THROWS_AS(atomic_lp_bound(mean, atoms_1d({0.0, 0.25})), Error);
    CHECK_THROWS_AS(atomic_lp_bound(mean, atoms_1d({0.5, 1.5})), Error);
  }

  TEST_CASE("LP bound grows under grid refinement") {
    auto p = fixtures::running_example(0.9);
    double last = -1.0;
    for (int ppa : {3, 5, 9, 17, 33}) {
      const auto lp = atomic_lp_bound(p, sample_delta(p.delta(), ppa));
      CHECK(lp.lower_bound >= last - 1e-12);
      for (double w : lp.weights) CHECK(w >= 0.0);
      last = lp.lower_bound;
    }
    CHECK(last == doctest::Approx(0.9));
  }

  TEST_CASE("simplex") {
    // maximize x + y s.t. x + 2y <= 4, 3x + y <= 6
    Eigen::MatrixXd a(2, 2);
    a << 1, 2, 3, 1;
    const auto r = solve_lp(Eigen::Vector2d(1, 1), a, {MomentRelation::LessEqual,
                                                        MomentRelation::LessEqual},
                            Eigen::Vector2d(4, 6));
    REQUIRE(r.status == LPStatus::Optimal);
    CHECK(r.objective == doctest::Approx(2.8));

    Eigen::MatrixXd b(2, 1);
    b << 1, 1;
    CHECK(solve_lp(Eigen::VectorXd::Ones(1), b, {MomentRelation::GreaterEqual,
                                                 MomentRelation::LessEqual},
                   Eigen::Vector2d(2, 1))
              .status == LPStatus::Infeasible);
    Eigen::MatrixXd c(1, 1);
    c << 1;
    CHECK(solve_lp(Eigen::VectorXd::Ones(1), c, {MomentRelation::GreaterEqual},
                   Eigen::VectorXd::Ones(1))
              .status == LPStatus::Unbounded);
  }
}
