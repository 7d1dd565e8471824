#include <doctest.h>

#include "dstab/poly.hpp"
#include "dstab/sets.hpp"

using namespace dstab;

namespace {

SemialgebraicSet interval(double lo, double hi) {
  const std::vector<double> l = {lo}, h = {hi};
  return box_set({"rho"}, l, h);
}

}  // namespace

TEST_SUITE("sets") {
  TEST_CASE("region presets") {
    const auto lhp = region_preset(RegionPreset::LeftHalfPlaneClosure);
    REQUIRE(lhp.set.constraints().size() == 1);
    CHECK(lhp.set.constraints()[0].relation == Relation::GreaterEqualZero);
    const double neg[2] = {-0.1, 0.0};
    CHECK_FALSE(contains(lhp.set, neg, 0.0));
    const double zero[2] = {0.0, 3.0};
    CHECK(contains(lhp.set, zero, 0.0));

    const auto origin = region_preset(RegionPreset::Origin);
    REQUIRE(origin.set.constraints().size() == 2);
    for (const auto& c : origin.set.constraints()) CHECK(c.relation == Relation::EqualZero);

    const auto disk = region_preset(RegionPreset::UnitDiskExteriorClosure);
    const double one[2] = {1.0, 0.0};
    CHECK(contains(disk.set, one, 0.0));
    const double half[2] = {0.5, 0.5};
    CHECK_FALSE(contains(disk.set, half, 0.0));

    for (auto p : {RegionPreset::LeftHalfPlaneClosure, RegionPreset::UnitDiskExteriorClosure,
                   RegionPreset::ImaginaryAxis, RegionPreset::Origin}) {
      CHECK(parse_region_preset(to_string(p)) == p);
    }
    CHECK_FALSE(parse_region_preset("nowhere").has_value());
  }

  TEST_CASE("box constraints") {
    const auto d = interval(0.0, 1.0);
    REQUIRE(d.constraints().size() == 2);
    const double mid[1] = {0.5};
    CHECK(contains(d, mid, 0.0));
    const double above[1] = {1.0 + 1e-9};
    CHECK(contains(d, above, 1e-8));
    CHECK_FALSE(contains(d, above, 0.0));
    CHECK(is_box(d));
    const auto b = axis_bounds(d);
    REQUIRE(b[0].has_value());
    CHECK(b[0]->lo == 0.0);
    CHECK(b[0]->hi == 1.0);
  }

  TEST_CASE("degenerate interval") {
    const auto d = interval(0.3, 0.3);
    const double at[1] = {0.3};
    CHECK(contains(d, at, 0.0));
    const double off[1] = {0.31};
    CHECK_FALSE(contains(d, off, 1e-8));
    CHECK(membership_margin(d, at) == doctest::Approx(0.0));
  }

  TEST_CASE("bifurcation intervals give six constraints") {
    const double k = 1.0;
    const std::vector<double> lo = {9 - k, 2 - k, 2 - k}, hi = {9 + k, 2 + k, 2 + k};
    const auto d = box_set({"rho1", "rho2", "rho3"}, lo, hi);
    CHECK(d.constraints().size() == 6);
    CHECK(is_box(d));
  }

  TEST_CASE("non-box sets") {
    const auto x = Polynomial::variable(2, 0), y = Polynomial::variable(2, 1);
    SemialgebraicSet disk({"x", "y"}, {{-(x * x) - y * y + 1.0, Relation::GreaterEqualZero}});
    CHECK_FALSE(is_box(disk));
    const auto b = axis_bounds(disk);
    CHECK_FALSE(b[0].has_value());
    const double in[2] = {0.6, 0.0};
    CHECK(membership_margin(disk, in) == doctest::Approx(0.64));
  }

  TEST_CASE("equalities as pairs") {
    const auto x = Polynomial::variable(1, 0);
    SemialgebraicSet s({"x"}, {{x - 0.5, Relation::EqualZero}});
    const auto pairs = s.equalities_as_pairs();
    REQUIRE(pairs.constraints().size() == 2);
    CHECK(pairs.constraints()[0].poly == -pairs.constraints()[1].poly);
    const double at[1] = {0.5};
    CHECK(contains(pairs, at, 0.0));
    const double off[1] = {0.6};
    CHECK(membership_margin(s, off) == doctest::Approx(-0.1));
  }

  TEST_CASE("compactification") {
    const auto ball = compactify(SemialgebraicSet({"a", "b"}), 1.0);
    REQUIRE(ball.constraints().size() == 1);
    const double in[2] = {0.6, 0.8};
    CHECK(contains(ball, in, 1e-12));
    const double out[2] = {0.8, 0.8};
    CHECK_FALSE(contains(ball, out, 0.0));

    const auto seg = compactify(region_preset(RegionPreset::ImaginaryAxis).set, 2.0);
    CHECK(seg.constraints().size() == 2);
    const double top[2] = {0.0, 2.0};
    CHECK(contains(seg, top, 1e-12));
    const double beyond[2] = {0.0, 2.1};
    CHECK_FALSE(contains(seg, beyond, 0.0));
  }

  TEST_CASE("restriction to real eigenvalues") {
    const auto r = restrict_to_real(region_preset(RegionPreset::UnitDiskExteriorClosure));
    CHECK(r.real_spectrum_only);
    CHECK(r.set.dimension() == 1);
    const double two[1] = {2.0};
    CHECK(contains(r.set, two, 0.0));
    const double half[1] = {0.5};
    CHECK_FALSE(contains(r.set, half, 0.0));
  }
}
