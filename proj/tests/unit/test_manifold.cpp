#include "support.hpp"
#include "wsob/ball.hpp"
#include "wsob/manifold.hpp"

#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>

using namespace wsob;

TEST_SUITE("manifold") {
  TEST_CASE("builtin metrics at sample points") {
    Manifold E = make_builtin("euclidean", 2);
    CHECK(E.metric(vec({0.3, -0.7})).isApprox(Mat::Identity(2, 2)));
    Manifold P = make_builtin("poincare_ball", 2);
    CHECK(P.metric(vec({0, 0})).isApprox(4 * Mat::Identity(2, 2)));
    CHECK(metric_at(P, P.point(vec({0.5, 0})))(0, 0) == doctest::Approx(64.0 / 9).epsilon(1e-14));
    Manifold S = make_builtin("sphere_stereo", 2);
    CHECK(S.metric(vec({1, 0})).isApprox(Mat::Identity(2, 2)));
    Manifold C = make_builtin("hyperbolic_cusp", 2, {{"T", 5}});
    Mat g = C.metric(vec({2, 0}));
    CHECK(g(0, 0) == 1.0);
    CHECK(g(1, 1) == doctest::Approx(std::exp(-4.0)).epsilon(1e-15));
    CHECK(g(0, 1) == 0.0);
  }

  TEST_CASE("metric partials") {
    Manifold E = make_builtin("euclidean", 3);
    CHECK(E.partials(vec({0.1, 0.2, 0.3})).max_abs() == 0.0);

    Manifold C = make_builtin("hyperbolic_cusp", 2);
    Rank3 d = C.partials(vec({1, 0.5}));
    CHECK(d(0, 1, 1) == doctest::Approx(-2 * std::exp(-2.0)));
    d(0, 1, 1) = 0.0;
    CHECK(d.max_abs() == 0.0);

    // analytic value against central differences
    Manifold P = make_builtin("poincare_ball", 2);
    Vec x = vec({0.5, 0});
    double analytic = P.partials(x)(0, 0, 0);
    double fd = fd_partials(P.window_chart(), x)(0, 0, 0);
    CHECK(analytic == doctest::Approx(16 * 0.5 / std::pow(0.75, 3)).epsilon(1e-14));
    CHECK(analytic == doctest::Approx(18.963).epsilon(1e-4));
    CHECK(std::abs(fd - analytic) / analytic < 1e-6);
  }

  TEST_CASE("volume element") {
    CHECK(volume_element(make_builtin("euclidean", 2), Point{"main", vec({4, 5})}) == 1.0);
    Manifold P = make_builtin("poincare_ball", 2);
    CHECK(P.volume_element(vec({0, 0})) == doctest::Approx(4.0));
    Manifold C = make_builtin("hyperbolic_cusp", 2);
    CHECK(C.volume_element(vec({3, 1})) == doctest::Approx(std::exp(-3.0)));
  }

  TEST_CASE("every builtin is SPD with consistent partials on 1000 window points") {
    for (const char* kind : {"euclidean", "poincare_ball", "sphere_stereo", "hyperbolic_cusp"}) {
      for (int n : {2, 3}) {
        Manifold M = make_builtin(kind, n);
        const Box& w = M.window();
        double worst = 0.0;
        for (int i = 1; i <= 1000; ++i) {
          Vec x(n);
          for (int a = 0; a < n; ++a) x[a] = w.lo[a] + (w.hi[a] - w.lo[a]) * halton(i, a == 0 ? 2 : a == 1 ? 3 : 5);
          Mat g = M.metric(x);
          REQUIRE((g - g.transpose()).cwiseAbs().maxCoeff() == 0.0);
          REQUIRE(eigen_range(g).min > 0.0);
          Rank3 an = M.partials(x), fd = fd_partials(M.window_chart(), x);
          double scale = std::max(an.max_abs(), g.cwiseAbs().maxCoeff());
          for (int k = 0; k < n; ++k)
            worst = std::max(worst, (an.slice(k) - fd.slice(k)).cwiseAbs().maxCoeff() / scale);
        }
        INFO(kind << " n=" << n);
        CHECK(worst < 1e-6);
      }
    }
  }

  TEST_CASE("errors") {
    CHECK_THROWS_AS(make_builtin("torus", 2), ParameterError);
    CHECK_THROWS_AS(make_builtin("poincare_ball", 2, {{"margin", 0.01}}), ParameterError);
    // window reaching the singular locus
    CHECK_THROWS_AS(make_builtin("poincare_ball", 2, {}, Box::from_center(vec({0, 0}), vec({0.8, 0.8}))),
                    ParameterError);
    CHECK_THROWS_AS(make_builtin("hyperbolic_cusp", 1), ParameterError);
    Manifold P = make_builtin("poincare_ball", 2);
    CHECK_THROWS_AS(P.metric(vec({0.97, 0})), DomainError);
    CHECK_THROWS_AS(metric_at(P, Point{"main", vec({0.99, 0})}), DomainError);
    CHECK_THROWS_AS(fd_partials(P.window_chart(), vec({0.95 - 5e-6, 0})), DomainError);
    CHECK_THROWS_AS(metric_at(P, Point{"other", vec({0, 0})}), ParameterError);
  }

  TEST_CASE("spec files round trip") {
    ManifoldSpec s = ManifoldSpec::load(manifold_path("cusp2.json"));
    CHECK(s.kind == "hyperbolic_cusp");
    CHECK(s.n == 2);
    REQUIRE(s.cover_window.has_value());
    ManifoldSpec t = ManifoldSpec::from_json(s.to_json());
    CHECK(t.to_json() == s.to_json());
    Manifold M = make_manifold(t);
    CHECK(M.cover_window().lo[0] == doctest::Approx(4.0));
    CHECK(M.window().hi[0] == doctest::Approx(7.5));
    for (const char* f : {"euclid2.json", "euclid3.json", "poincare2.json", "sphere2.json", "cusp.json"})
      CHECK_NOTHROW(load_manifold(manifold_path(f)));
    CHECK_THROWS(ManifoldSpec::from_json("{\"kind\": \"euclidean\"}"));
  }

  TEST_CASE("oracles") {
    Manifold P = make_builtin("poincare_ball", 2);
    CHECK(P.oracle("sectional_curvature") == -1.0);
    CHECK(P.oracle("geodesic_ball_volume", 1.0) == doctest::Approx(3.4123).epsilon(1e-4));
    CHECK_THROWS_AS(P.oracle("nothing"), ParameterError);
    CHECK(unit_ball_volume(2) == doctest::Approx(M_PI));
    CHECK(unit_ball_volume(3) == doctest::Approx(4 * M_PI / 3));
  }
}
