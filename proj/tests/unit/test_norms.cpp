#include "support.hpp"
#include "wsob/covering.hpp"
#include "wsob/norms.hpp"

#include <doctest.h>

#include <cmath>

using namespace wsob;

namespace {

FormField one(int n) { return scalar_form(ScalarField::poly(Polynomial::constant(n, 1.0))); }

FormField bump(const Vec& c, const Vec& radii, double amp = 1.0) {
  return scalar_form(ScalarField::bump(Bump::ellipsoid(c, radii), amp));
}

}  // namespace

TEST_SUITE("norms") {
  TEST_CASE("gauss legendre") {
    for (int m : {1, 5, 24, 48}) {
      const GaussRule& g = gauss_legendre(m);
      double s0 = 0, s = 0;
      for (int i = 0; i < m; ++i) {
        s0 += g.w[i];
        s += g.w[i] * std::pow(g.x[i], 2 * m - 2);
      }
      CHECK(s0 == doctest::Approx(2.0));
      CHECK(s == doctest::Approx(2.0 / (2 * m - 1)));
    }
    CHECK(box_rule(Box{vec({0, 1}), vec({2, 4})}, 8).volume() == doctest::Approx(6.0));
    CHECK(box_rule(Box{vec({0, 1}), vec({0, 4})}, 8).size() == 0u);
    BallRegion B{vec({0.5, 0, 0}), Mat::Identity(3, 3), 0.7};
    CHECK(ball_rule(B).volume() == doctest::Approx(B.coordinate_volume()).epsilon(1e-12));
  }

  TEST_CASE("unit square") {
    Manifold E = make_builtin("euclidean", 2);
    Box sq{vec({0, 0}), vec({1, 1})};
    CHECK(lp_norm(E, one(2), sq, 1.0) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(lp_norm(E, one(2), sq, 3.0) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(sobolev_norm(E, one(2), sq, 2, 2.0) == doctest::Approx(1.0).epsilon(1e-12));
  }

  TEST_CASE("hyperbolic disc area") {
    Manifold P = make_builtin("poincare_ball", 2);
    BallRegion B{vec({0, 0}), Mat::Identity(2, 2), std::tanh(0.5)};
    double area = lp_norm(P, one(2), B, 1.0);
    CHECK(area == doctest::Approx(P.oracle("geodesic_ball_volume", 1.0)).epsilon(1e-10));
    CHECK(area == doctest::Approx(3.4123).epsilon(1e-4));
  }

  TEST_CASE("node doubling") {
    Manifold P = make_builtin("poincare_ball", 2);
    FormField f = bump(vec({0.05, -0.1}), vec({0.2, 0.15}));
    double a = sobolev_norm(P, f, P.window(), 1, 2.0, {}, 24), b = sobolev_norm(P, f, P.window(), 1, 2.0, {}, 48);
    CHECK(std::abs(a - b) / b < 1e-3);
  }

  TEST_CASE("sobolev terms reduce to lebesgue norms") {
    Manifold C = make_builtin("hyperbolic_cusp", 2);
    FormField f = bump(vec({3, 3}), vec({0.4, 0.5}), -1.3);
    Quadrature q = support_rule(C, f, 32);
    auto t = sobolev_terms(C, f, q, 2, 2.5);
    REQUIRE(t.size() == 3u);
    CHECK(t[0] == doctest::Approx(lp_norm(C, f, q, 2.5)));
    CHECK(sobolev_norm(C, f, q, 0, 2.5) == doctest::Approx(t[0]));
    CHECK(sobolev_norm(C, f, q, 1, 2.5) == doctest::Approx(t[0] + t[1]));
    CHECK(sobolev_norm(C, f, q, 2, 2.5) == doctest::Approx(t[0] + t[1] + t[2]));
    CHECK(sobolev_norm(C, f, q, 1, 2.5) > t[0]);
    CHECK_THROWS_AS(sobolev_terms(C, f, q, 3, 2.0), ParameterError);
    CHECK_THROWS_AS(sobolev_terms(C, f, q, 1, 0.5), ParameterError);
  }

  TEST_CASE("zero field") {
    Manifold E = make_builtin("euclidean", 2);
    FormField z = make_form(2, 1, {ScalarField(2), ScalarField(2)});
    CHECK(lp_norm(E, z, E.window(), 2.0) == 0.0);
    CHECK(sobolev_norm(E, z, E.window(), 2, 2.0) == 0.0);
  }

  TEST_CASE("homogeneity and triangle inequality") {
    Manifold S = make_builtin("sphere_stereo", 2);
    FormField a = bump(vec({0.2, 0.1}), vec({0.5, 0.4})), b = bump(vec({-0.3, 0.2}), vec({0.3, 0.6}), -2.0);
    Box w = S.window();
    for (double tau : {1.0, 2.0, 3.5}) {
      CHECK(lp_norm(S, scaled(a, -2.5), w, tau) == doctest::Approx(2.5 * lp_norm(S, a, w, tau)));
      CHECK(lp_norm(S, sum(a, b), w, tau) <= lp_norm(S, a, w, tau) + lp_norm(S, b, w, tau));
    }
    CHECK(sobolev_norm(S, scaled(a, 3.0), w, 1, 2.0) == doctest::Approx(3 * sobolev_norm(S, a, w, 1, 2.0)));
    CHECK(sobolev_norm(S, sum(a, b), w, 1, 2.0) <= sobolev_norm(S, a, w, 1, 2.0) + sobolev_norm(S, b, w, 1, 2.0));
  }

  TEST_CASE("admissible ball volume") {
    const double eps = 0.1;
    for (const char* kind : {"poincare_ball", "hyperbolic_cusp"}) {
      Manifold M = make_builtin(kind, 2);
      Vec x = M.window().center() + 0.3 * M.window().halfwidths();
      AdmissibleBall B = make_ball(M, x, admissible_radius(M, x, 0, eps), 0, eps);
      double vol = lp_norm(M, one(2), ball_region(B), 1.0);
      double flat = M_PI * B.radius * B.radius;
      INFO(kind);
      CHECK(vol >= (1 - eps) * flat);
      CHECK(vol <= (1 + eps) * flat);
    }
  }

  TEST_CASE("normalized chart comparison") {
    Manifold P = make_builtin("poincare_ball", 2);
    Vec x = vec({0.3, 0});
    AdmissibleBall B = make_ball(P, x, admissible_radius(P, x, 0, 0.1), 0, 0.1);
    NormalizedFrame F = B.frame;
    FormField f = scalar_form(ScalarField::bump(Bump::ellipsoid(x, F.L, 0.8 * B.radius)));
    ChartComparison c = chart_comparison(P, f, B, 2.0);
    CHECK(c.m_W / c.same_W >= 0.81);
    CHECK(c.m_W / c.same_W <= 1.21);
    CHECK(c.m_L / c.same_L >= std::pow(0.9, 0.5));
    CHECK(c.m_L / c.same_L <= std::pow(1.1, 0.5));
    // the support sits inside all three flat balls
    CHECK(c.inner_W == doctest::Approx(c.same_W).epsilon(1e-2));
    CHECK(c.outer_W == doctest::Approx(c.same_W).epsilon(1e-2));
    AdmissibleBall big = B;
    big.radius = 4 * B.radius;
    CHECK_THROWS_AS(chart_comparison(P, f, big, 2.0), ParameterError);
  }

  TEST_CASE("localization on the flat square") {
    Manifold E = make_builtin("euclidean", 2, {}, Box{vec({0, 0}), vec({4, 4})});
    RadiusField field = RadiusField::over_window(E, 0, 0.1);
    Covering cv = vitali_cover(E, field);
    FormField f = bump(vec({2, 2}), vec({0.5, 0.7}));
    LocalizationReport r = localization_check(E, f, cv, 2.0, 0.0, field, overlap_bound(2, 0.1));
    CHECK(r.ok);
    CHECK(r.ratio >= 1.0);
    CHECK(r.balls_used > 0u);
    CHECK_THROWS_AS(localization_check(E, bump(vec({4, 2}), vec({0.5, 0.5})), cv, 2.0, 0.0, field, 1.0),
                    ParameterError);
  }

  TEST_CASE("localization on the cusp") {
    Manifold C = make_builtin("hyperbolic_cusp", 2, {}, Box::from_center(vec({3, M_PI}), vec({1.0, M_PI})));
    C.set_cover_window(Box{vec({2.65, 3.0}), vec({3.35, 3.3})});
    RadiusField field = RadiusField::over_window(C, 0, 0.1);
    Covering cv = vitali_cover(C, field);
    FormField f = bump(vec({3, 3.15}), vec({0.3, 0.12}));
    for (double mu : {0.0, 2.0}) {
      LocalizationReport r = localization_check(C, f, cv, 2.0, mu, field, overlap_bound(2, 0.1));
      INFO("mu=" << mu);
      CHECK(r.ok);
    }
  }

  TEST_CASE("sequences and hoelder on balls") {
    CHECK(lp_sequence_compare({3, 4}, 2, 1));
    CHECK(lp_sequence_compare({0.1, 0.2, 0.3, 5}, 3, 1.5));
    CHECK(lp_sequence_compare({}, 2, 2));
    CHECK_THROWS_AS(lp_sequence_compare({1, 2}, 1, 2), ParameterError);
    CHECK_THROWS_AS(lp_sequence_compare({-1.0}, 2, 1), ParameterError);

    Manifold E = make_builtin("euclidean", 2);
    AdmissibleBall B = make_ball(E, vec({0, 0}), 1.0, 0, 0.1);
    HolderReport h = holder_ball_check(E, one(2), B, 2.0, 4.0);
    CHECK(h.ok);
    CHECK(h.c == doctest::Approx(std::pow(M_PI, 0.25)));
    CHECK_THROWS_AS(holder_ball_check(E, one(2), B, 4.0, 2.0), ParameterError);
    FormField z = make_form(2, 0, {ScalarField(2)});
    CHECK(holder_ball_check(E, z, B, 2.0, 4.0).vacuous);
  }

  TEST_CASE("sobolev exponents") {
    SobolevParams p = SobolevParams::make(2, 1, 0, 4.0 / 3, 0.0);
    CHECK(p.s == doctest::Approx(4.0));
    CHECK(p.nu == doctest::Approx(8.0));
    SobolevParams q = SobolevParams::make(3, 1, 0, 2.0, 1.0);
    CHECK(q.s == doctest::Approx(6.0));
    CHECK(q.nu == doctest::Approx(15.0));
    CHECK_THROWS_AS(SobolevParams::make(2, 1, 0, 2.0, 0.0), ParameterError);
    CHECK_THROWS_AS(SobolevParams::make(2, 0, 1, 2.0, 0.0), ParameterError);
    CHECK_THROWS_AS(SobolevParams::make(2, 1, 0, 0.5, 0.0), ParameterError);
  }
}
