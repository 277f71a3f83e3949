#include "support.hpp"
#include "wsob/covering.hpp"
#include "wsob/norms.hpp"

#include <doctest.h>

#include <cmath>

using namespace wsob;

namespace {

Manifold euclid_square() {
  Manifold E = make_builtin("euclidean", 2, {}, Box{vec({0, 0}), vec({4, 4})});
  return E;
}

Manifold small_cusp() {
  Manifold C = make_builtin("hyperbolic_cusp", 2, {}, Box::from_center(vec({4.5, M_PI}), vec({1.0, M_PI})));
  C.set_cover_window(Box{vec({4.0, 3.0}), vec({5.0, 3.3})});
  return C;
}

}  // namespace

TEST_SUITE("covering") {
  TEST_CASE("overlap bounds") {
    CHECK(overlap_bound(2, 0.1) == doctest::Approx(1.1 / 0.9 * 1e4));
    CHECK(overlap_bound_full(2, 0.1) == doctest::Approx(4 * 1.1 / 0.9 * 1e4));
    CHECK(overlap_bound(3, 0.2) == doctest::Approx(std::pow(1.2 / 0.8, 1.5) * 1e6));
  }

  TEST_CASE("chart distance") {
    Manifold E = make_builtin("euclidean", 2);
    CHECK(chart_distance(E, vec({0, 0}), vec({0.3, 0.4})) == doctest::Approx(0.5));
    Manifold C = make_builtin("hyperbolic_cusp", 2);
    CHECK(chart_distance(C, vec({2, 1}), vec({2, 1.5})) == doctest::Approx(0.5 * std::exp(-2.0)));
    // the short way round the circle
    CHECK(chart_distance(C, vec({2, 0.1}), vec({2, 2 * M_PI - 0.1})) == doctest::Approx(0.2 * std::exp(-2.0)));
  }

  TEST_CASE("flat square") {
    Manifold E = euclid_square();
    RadiusField f = RadiusField::over_window(E, 0, 0.1);
    Covering cv = vitali_cover(E, f);
    CHECK(cv.size() > 100u);
    for (double r : cv.base_radii) CHECK(r == doctest::Approx(0.1));
    CHECK(base_balls_disjoint(E, cv));
    OverlapStats st = overlap_stats(E, cv, grid_points(E.cover_window(), cv.probe_pitch));
    CHECK(st.uncovered == 0u);
    CHECK(st.max_dilated <= 25);
    CHECK(st.max_base <= 1);
    CHECK(st.ok());
    // packing bound: disjoint base discs of radius 0.1 inside [-0.1, 4.1]^2
    CHECK(cv.size() <= static_cast<std::size_t>(4.2 * 4.2 / (M_PI * 0.01)));
  }

  TEST_CASE("single candidate") {
    Manifold E = euclid_square();
    RadiusField f = RadiusField::over_window(E, 0, 0.1);
    Covering cv = vitali_cover(E, f, {vec({2, 2})}, E.window());
    REQUIRE(cv.size() == 1u);
    CHECK(cv.radius(0) == doctest::Approx(1.0));
    CHECK(cv.dilated(0) == doctest::Approx(0.5));
  }

  TEST_CASE("sparse candidates leave probes uncovered") {
    Manifold E = euclid_square();
    RadiusField f = RadiusField::over_window(E, 0, 0.1);
    Covering cv = vitali_cover(E, f, {vec({0, 0}), vec({4, 4})}, E.window());
    auto probes = grid_points(E.window(), vec({0.25, 0.25}));
    CHECK_THROWS_WITH_AS(verify_coverage(E, cv, probes), doctest::Contains("grid too coarse"), NumericalError);
    CHECK(overlap_stats(E, cv, probes).uncovered > 0u);
    CoverOptions opt;
    opt.grid_pitch = 1.0;
    CHECK_THROWS_AS(vitali_cover(E, f, opt), ParameterError);
  }

  TEST_CASE("cusp centers thicken with depth") {
    Manifold C = small_cusp();
    RadiusField f = RadiusField::over_window(C, 1, 0.1);
    Covering cv = vitali_cover(C, f);
    std::size_t shallow = 0, deep = 0;
    for (const Vec& x : cv.centers) (x[0] < 4.5 ? shallow : deep)++;
    CHECK(deep > shallow);
    OverlapStats st = overlap_stats(C, cv, grid_points(C.cover_window(), cv.probe_pitch));
    CHECK(st.ok());
  }

  TEST_CASE("cover region wider than half a period") {
    Manifold C = make_builtin("hyperbolic_cusp", 2, {}, Box::from_center(vec({4.5, M_PI}), vec({1.0, M_PI})));
    C.set_cover_window(Box{vec({4.0, 0.5}), vec({4.2, 4.5})});
    RadiusField f = RadiusField::over_window(C, 0, 0.1);
    CHECK_THROWS_AS(vitali_cover(C, f), ParameterError);
  }

  TEST_CASE("deterministic") {
    Manifold C = small_cusp();
    RadiusField f = RadiusField::over_window(C, 0, 0.1);
    Covering a = vitali_cover(C, f), b = vitali_cover(C, f);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
      CHECK(a.centers[i] == b.centers[i]);
      CHECK(a.base_radii[i] == b.base_radii[i]);
    }
  }

  TEST_CASE("weights") {
    Manifold E = make_builtin("euclidean", 2);
    RadiusField fe = RadiusField::over_window(E, 0, 0.1);
    CHECK(weight_at(vec({0.2, 0.2}), 3.0, fe) == 1.0);
    Manifold P = make_builtin("poincare_ball", 2);
    RadiusField fp = RadiusField::over_window(P, 0, 0.1);
    Vec x = vec({0.1, 0.2});
    CHECK(weight_at(x, 0.0, fp) == 1.0);
    CHECK(weight_at(x, 2.0, fp) == doctest::Approx(fp.at(x) * fp.at(x)));
    CHECK(weight_at(x, -1.0, fp) == doctest::Approx(1.0 / fp.at(x)));
    CHECK((Weight{&fp, 2.0}.at(x)) == doctest::Approx(weight_at(x, 2.0, fp)));
    CHECK(Weight{}.at(x) == 1.0);
  }
}
