#include <doctest.h>

#include <random>

#include "dstab/error.hpp"
#include "dstab/poly.hpp"

using namespace dstab;

namespace {

Polynomial random_poly(std::mt19937_64& rng, std::size_t n, int degree, int terms) {
  std::uniform_real_distribution<double> coef(-3.0, 3.0);
  Polynomial p(n);
  for (int t = 0; t < terms; ++t) {
    Exponent a(n, 0);
    int left = degree;
    for (auto& e : a) {
      e = std::uniform_int_distribution<int>(0, left)(rng);
      left -= e;
    }
    p = p + Polynomial::monomial(a, coef(rng));
  }
  return p;
}

}  // namespace

TEST_SUITE("poly") {
  TEST_CASE("parse expands products and powers") {
    const auto p = parse_polynomial("rho^2 - 2*rho + 1", {"rho"});
    CHECK(p.terms().size() == 3);
    CHECK(p.coefficient({2}) == 1.0);
    CHECK(p.coefficient({1}) == -2.0);
    CHECK(p.coefficient({0}) == 1.0);
    CHECK(p == parse_polynomial("(rho - 1)^2", {"rho"}));
  }

  TEST_CASE("zero polynomial") {
    const auto p = parse_polynomial("0", {"rho"});
    CHECK(p.is_zero());
    CHECK(p.degree() == 0);
    CHECK(p.terms().empty());
  }

  TEST_CASE("characteristic polynomial of the Hurwitz example") {
    const auto p = parse_polynomial(
        "s^2 + (5.3 + 2*r + r^2)*s + 0.96 + 4.8*r + 15.9*r^2 + 2*r^3 - 2*r^4", {"s", "r"});
    CHECK(p.degree() == 4);
    const double origin[2] = {0.0, 0.0};
    CHECK(p.evaluate(origin) == doctest::Approx(0.96));
    const double one[2] = {1.0, 0.0};
    CHECK(p.evaluate(one) == doctest::Approx(7.26));
  }

  TEST_CASE("arithmetic") {
    const auto rho = Polynomial::variable(1, 0);
    CHECK((rho - 1.0) * (rho + 1.0) == rho * rho - 1.0);
    CHECK((rho + (-rho)).is_zero());
    const auto q = (rho * rho + 1.0) * 0.5;
    const double two[1] = {2.0};
    CHECK(q.evaluate(two) == doctest::Approx(2.5));
    CHECK(Polynomial::constant(3, 1.0).evaluate(std::vector<double>{4.0, -2.0, 7.0}) == 1.0);
    const double at_one[1] = {1.0};
    CHECK((rho - 1.0).evaluate(at_one) == 0.0);
    CHECK(rho.pow(0) == Polynomial::constant(1, 1.0));
  }

  TEST_CASE("mismatched variable counts are rejected") {
    CHECK_THROWS_AS(Polynomial::variable(1, 0) + Polynomial::variable(2, 0), Error);
  }

  TEST_CASE("embedding into the lifted variables") {
    const auto f = parse_polynomial("rho", {"rho"});
    const auto e = embed(f, {"rho"}, {"rho", "lre", "x1", "x2"});
    CHECK(e == Polynomial::monomial({1, 0, 0, 0}));
    const auto c = embed(Polynomial::constant(1, 1.0), {"rho"}, {"a", "rho", "b"});
    CHECK(c == Polynomial::constant(3, 1.0));
    const auto sq = embed(parse_polynomial("rho^2", {"rho"}), {"rho"}, {"rho", "lre", "x1"});
    CHECK(sq.evaluate(std::vector<double>{0.5, 9.0, -3.0}) == doctest::Approx(0.25));
    CHECK_THROWS_AS(embed(f, {"rho"}, {"lre"}), Error);
  }

  TEST_CASE("monomial basis order and size") {
    const auto b1 = monomial_basis(1, 2);
    REQUIRE(b1.size() == 3);
    CHECK(b1[0] == Exponent{0});
    CHECK(b1[1] == Exponent{1});
    CHECK(b1[2] == Exponent{2});
    CHECK(monomial_basis(4, 1).size() == 5);
    const auto b = monomial_basis(4, 2);
    CHECK(b.size() == 15);
    CHECK(b.size() == binomial(6, 2));
    CHECK(basis_index(b, {0, 0, 0, 0}) == 0);
    CHECK(basis_index(b, {1, 0, 0, 0}) == 1);
    CHECK(basis_index(b, {0, 0, 0, 2}) == 14);
    CHECK(b[5] == Exponent{2, 0, 0, 0});
    CHECK(b[6] == Exponent{1, 1, 0, 0});
    CHECK_THROWS_AS(basis_index(b, {3, 0, 0, 0}), Error);
    CHECK(monomial_basis(7, 6).size() == 1716);
  }

  TEST_CASE("parse errors carry positions") {
    try {
      parse_polynomial("rho + * 2", {"rho"});
      FAIL("expected a parse error");
    } catch (const ParseError& e) {
      CHECK(e.column() == 7);
    }
    CHECK_THROWS_AS(parse_polynomial("sigma", {"rho"}), ParseError);
    CHECK_THROWS_AS(parse_polynomial("rho^-1", {"rho"}), ParseError);
    CHECK_THROWS_AS(parse_polynomial("(rho + 1", {"rho"}), ParseError);
  }

  TEST_CASE("affine substitution matches composition") {
    const auto p = parse_polynomial("x^2*y - 3*y + 1", {"x", "y"});
    const double shift[2] = {1.0, -2.0};
    const double scale[2] = {2.0, 0.5};
    const auto q = p.substitute_affine(shift, scale);
    const double z[2] = {0.3, -0.7};
    const double w[2] = {1.0 + 2.0 * 0.3, -2.0 + 0.5 * -0.7};
    CHECK(q.evaluate(z) == doctest::Approx(p.evaluate(w)));
  }

  TEST_CASE("to_string round-trips through the parser") {
    std::mt19937_64 rng(7);
    const std::vector<std::string> names = {"a", "b", "c"};
    for (int k = 0; k < 50; ++k) {
      const auto p = random_poly(rng, 3, 4, 6);
      CHECK(parse_polynomial(p.to_string(names), names) == p);
    }
  }

  TEST_CASE("ring identities on random polynomials") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int k = 0; k < 30; ++k) {
      const auto p = random_poly(rng, 2, 3, 4);
      const auto q = random_poly(rng, 2, 3, 4);
      const auto r = random_poly(rng, 2, 2, 3);
      const double z[2] = {u(rng), u(rng)};
      CHECK((p * (q + r)).evaluate(z) == doctest::Approx((p * q + p * r).evaluate(z)));
      CHECK((p * q).evaluate(z) == doctest::Approx(p.evaluate(z) * q.evaluate(z)));
      CHECK((p * q).degree() <= p.degree() + q.degree());
    }
  }
}
