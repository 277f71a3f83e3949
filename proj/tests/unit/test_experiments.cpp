#include "support.hpp"
#include "wsob/experiments.hpp"

#include <doctest.h>

#include <cmath>
#include <sstream>

using namespace wsob;
using nlohmann::json;

TEST_SUITE("experiments") {
  TEST_CASE("report schema") {
    ExperimentReport rep;
    rep.experiment = "demo";
    rep.manifold = manifold_json(make_builtin("euclidean", 2));
    rep.add_row("a", 1.0, 4.0, {{"note", "x"}});
    rep.add_row("zero", 1.0, 0.0);
    rep.summary = {{"max_ratio", 0.25}};
    rep.extra = {{"centers", json::array()}};
    json j = json::parse(rep.dump());
    for (const char* k : {"experiment", "manifold", "params", "rows", "summary", "runtime_ms", "centers"})
      CHECK(j.contains(k));
    CHECK(j["runtime_ms"].is_null());
    CHECK(j["manifold"]["kind"] == "euclidean");
    CHECK(j["rows"][0]["field_id"] == "a");
    CHECK(j["rows"][0]["ratio"].get<double>() == doctest::Approx(0.25));
    CHECK(j["rows"][0]["note"] == "x");
    rep.runtime_ms = 12.5;
    CHECK(json::parse(rep.dump())["runtime_ms"].get<double>() == 12.5);
  }

  TEST_CASE("suites are reproducible and supported inside their region") {
    Box region{vec({-1, -1}), vec({1, 1})};
    SuiteOptions opt;
    opt.count = 8;
    opt.degree = 1;
    opt.seed = 5;
    opt.shape = SuiteShape::mixed;
    auto a = bump_suite(2, region, opt), b = bump_suite(2, region, opt);
    REQUIRE(a.size() == 8u);
    for (std::size_t i = 0; i < a.size(); ++i) {
      CHECK(a[i].id == b[i].id);
      CHECK(a[i].field.degree() == 1);
      Vec x = a[i].center;
      CHECK(a[i].field.value(x) == b[i].field.value(x));
      // slab bumps are unbounded along their slab axis
      const Box& s = a[i].field.support();
      for (int k = 0; k < 2; ++k) {
        if (std::isfinite(s.lo[k])) CHECK(s.lo[k] >= -1 - 1e-12);
        if (std::isfinite(s.hi[k])) CHECK(s.hi[k] <= 1 + 1e-12);
      }
    }
    opt.seed = 6;
    CHECK(bump_suite(2, region, opt)[0].center != a[0].center);
  }

  TEST_CASE("constant function constant on flat balls") {
    // ||1||_t / (R^-1 ||1||_r) = |B_1|^{-1/n} for every R
    const int n = 2;
    const double r = 1.5, t = 1 / (1 / r - 1.0 / n);
    Manifold E = make_builtin("euclidean", n);
    FormField u = scalar_form(ScalarField::poly(Polynomial::constant(n, 1.0)));
    for (double R : {0.1, 0.5, 1.0}) {
      Quadrature q = ball_rule(BallRegion{Vec::Zero(n), Mat::Identity(n, n), R});
      auto w = sobolev_terms(E, u, q, 1, r);
      CHECK(w[1] == 0.0);
      CHECK(lp_norm(E, u, q, t) / (w[0] / R) == doctest::Approx(std::pow(M_PI, -0.5)).epsilon(1e-10));
    }
  }

  TEST_CASE("flat scaling covariance") {
    ExperimentReport rep = check_euclidean_scaling(2, 1.5, {0.25, 0.5, 1.0}, 6, 1);
    CHECK(rep.passed);
    CHECK(rep.summary["rescaled_max_deviation"].get<double>() < 1e-6);
    CHECK_THROWS_AS(check_euclidean_scaling(2, 2.0, {1.0}, 3, 1), ParameterError);
    CHECK_THROWS_AS(check_euclidean_scaling(2, 1.5, {2.0}, 3, 1), ParameterError);
  }

  TEST_CASE("ball embedding constants on the poincare ball") {
    Manifold P = make_builtin("poincare_ball", 2);
    std::vector<AdmissibleBall> balls;
    for (double rad : {0.0, 0.3, 0.6}) {
      Vec x = vec({rad, 0});
      balls.push_back(make_ball(P, x, admissible_radius(P, x, 0, 0.1), 0, 0.1));
    }
    ExperimentReport rep = check_ball_embedding(P, balls, 1.5, 0, 6, 2);
    CHECK(rep.passed);
    CHECK_THROWS_AS(check_ball_embedding(P, balls, 2.0, 0, 6, 2), ParameterError);
    balls[0].radius *= 3;
    CHECK_THROWS_AS(check_ball_embedding(P, balls, 1.5, 0, 6, 2), ParameterError);
  }

  TEST_CASE("gaffney grid search") {
    std::vector<double> a{1, 2, 0.5}, b{1, 0.1, 3};
    std::vector<double> lhs(3);
    for (int i = 0; i < 3; ++i) lhs[i] = 3 * a[i] + 2 * b[i];
    GaffneyGrid g = gaffney_grid_search(lhs, a, b);
    REQUIRE(g.found);
    CHECK(g.C + g.c <= 5);
    for (int i = 0; i < 3; ++i) CHECK(lhs[i] <= g.C * a[i] + g.c * b[i] + 1e-12);
    // a single row lhs = a = b: (1, 1) beats nothing smaller
    g = gaffney_grid_search({1.0}, {1.0}, {1.0});
    CHECK(g.C == 1);
    CHECK(g.c == 1);
    // ties in C + c go to the smaller C
    g = gaffney_grid_search({2.0}, {1.0}, {1.0});
    CHECK(g.C + g.c == 2);
    CHECK(g.C == 1);
    CHECK_FALSE(gaffney_grid_search({1000.0}, {1.0}, {1.0}).found);
  }

  TEST_CASE("local gaffney on a cusp ball") {
    Manifold C = make_builtin("hyperbolic_cusp", 2);
    Vec x = vec({2.0, M_PI});
    AdmissibleBall b = make_ball(C, x, admissible_radius(C, x, 1, 0.1), 1, 0.1);
    ExperimentReport rep = run_gaffney_local(C, {b}, 2.0, 4, 1, 3);
    CHECK(rep.passed);
    CHECK(rep.rows.size() >= 4u);
    AdmissibleBall b0 = make_ball(C, x, admissible_radius(C, x, 0, 0.1), 0, 0.1);
    CHECK_THROWS_AS(run_gaffney_local(C, {b0}, 2.0, 4, 1, 3), ParameterError);
  }

  TEST_CASE("kato on flat space and vacuous suites") {
    Manifold E = make_builtin("euclidean", 2);
    SuiteOptions so;
    so.count = 4;
    so.degree = 1;
    so.seed = 2;
    auto suite = bump_suite(2, E.window(), so);
    for (int m : {0, 1}) {
      ExperimentReport rep = check_kato(E, suite, m, 30, 4);
      CHECK(rep.passed);
      CHECK(rep.summary["violations"] == 0);
    }
    ExperimentReport empty = check_kato(E, {}, 0, 30, 4);
    CHECK(empty.passed);
    CHECK(empty.summary["vacuous"] == true);
    CHECK_THROWS_AS(check_kato(E, suite, 2, 5, 1), ParameterError);
  }

  TEST_CASE("curvature report") {
    ExperimentReport rep = curvature_report(make_builtin("sphere_stereo", 2), 5, 1);
    CHECK(rep.passed);
    CHECK(rep.rows.size() >= 5u);
  }

  TEST_CASE("cover report and radius csv") {
    Manifold E = make_builtin("euclidean", 2, {}, Box{vec({0, 0}), vec({2, 2})});
    RadiusField f0 = RadiusField::over_window(E, 0, 0.1, 5), f1 = RadiusField::over_window(E, 1, 0.1, 5);
    ExperimentReport rep = cover_report(E, f0, {});
    json j = rep.to_json();
    CHECK(rep.passed);
    for (const char* k : {"centers", "radii", "max_overlap", "T", "T1"}) CHECK(j.contains(k));
    CHECK(j["T"].get<double>() == doctest::Approx(overlap_bound(2, 0.1)));

    std::istringstream csv(radius_csv(f0, f1));
    std::string line;
    std::getline(csv, line);
    CHECK(line == "x1,x2,R0,R1");
    int rows = 0;
    while (std::getline(csv, line)) {
      ++rows;
      CHECK(line.substr(line.rfind(',', line.size() - 3)) == ",1,1");
    }
    CHECK(rows == 25);
  }
}
