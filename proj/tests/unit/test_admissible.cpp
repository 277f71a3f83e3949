#include "support.hpp"
#include "wsob/admissible.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>

using namespace wsob;

TEST_SUITE("admissible") {
  TEST_CASE("ball sampler") {
    for (int n : {2, 3}) {
      BallSampler S(n, 8);
      REQUIRE(S.points().size() > static_cast<std::size_t>(1 + 2 * n));
      CHECK(S.points()[0].norm() == 0.0);
      for (const Vec& z : S.points()) CHECK(z.norm() <= 1.0 + 1e-15);
      int on_sphere = 0;
      for (const Vec& z : S.points()) on_sphere += std::abs(z.norm() - 1.0) < 1e-15;
      CHECK(on_sphere >= 2 * n);
    }
  }

  TEST_CASE("flat space is admissible everywhere") {
    Manifold E = make_builtin("euclidean", 2);
    BallSampler S(2);
    for (int cls : {0, 1}) {
      Admissibility a = is_admissible(E, vec({0.3, 0.4}), 3.0, cls, 0.1, S);
      CHECK(a.ok);
      CHECK(a.eig_min == doctest::Approx(1.0));
      CHECK(a.dg_term == 0.0);
      CHECK(admissible_radius(E, vec({0.5, -0.5}), cls, 0.1) == 1.0);
    }
  }

  TEST_CASE("poincare band edge at the origin") {
    Manifold P = make_builtin("poincare_ball", 2);
    BallSampler S(2);
    RadiusSearch s = search_radius(P, vec({0, 0}), 0, 0.1, S);
    double expect = 2 * std::sqrt(1 - 1 / std::sqrt(1.1));
    CHECK(expect == doctest::Approx(0.4314).epsilon(1e-3));
    CHECK(std::abs(s.r_prime - expect) / expect < 0.02);
    CHECK(s.radius == doctest::Approx(std::min(1.0, s.r_prime / 2)));
    CHECK_FALSE(is_admissible(P, vec({0, 0}), 1.05 * expect, 0, 0.1, S).ok);
    CHECK(is_admissible(P, vec({0, 0}), 0.95 * expect, 0, 0.1, S).ok);
  }

  TEST_CASE("cusp unit ball fails the derivative condition") {
    Manifold C = make_builtin("hyperbolic_cusp", 2);
    Admissibility a = is_admissible(C, vec({4, M_PI}), 1.0, 1, 0.1, BallSampler(2));
    CHECK_FALSE(a.ok);
    CHECK(admissible_radius(C, vec({4, M_PI}), 1, 0.1) < 1.0);
  }

  TEST_CASE("rotation symmetry on the poincare ball") {
    Manifold P = make_builtin("poincare_ball", 2);
    double r = 0.3;
    double a = admissible_radius(P, vec({r, 0}), 0, 0.1);
    double b = admissible_radius(P, vec({0, r}), 0, 0.1);
    double c = admissible_radius(P, vec({r / std::sqrt(2), -r / std::sqrt(2)}), 0, 0.1);
    CHECK(std::abs(a - b) / a < 0.02);
    CHECK(std::abs(a - c) / a < 0.02);
  }

  TEST_CASE("cusp radius does not grow with depth") {
    // The map (t, y) -> (t + c, e^c y) is an isometry, so R stays constant until
    // the half-period limit takes over and then decays.
    Manifold C = make_builtin("hyperbolic_cusp", 2);
    double prev = kInf;
    for (double t = 1.0; t <= 7.0; t += 0.5) {
      double R = admissible_radius(C, vec({t, M_PI}), 0, 0.1);
      CHECK(R <= prev * 1.03);
      prev = std::min(prev, R);
    }
    double deep = admissible_radius(C, vec({7.0, M_PI}), 0, 0.1);
    CHECK(deep < 0.5 * admissible_radius(C, vec({2.0, M_PI}), 0, 0.1));
  }

  TEST_CASE("class 1 radii never exceed class 0 radii") {
    for (const char* kind : {"poincare_ball", "sphere_stereo", "hyperbolic_cusp"}) {
      Manifold M = make_builtin(kind, 2);
      for (double f : {-0.6, 0.0, 0.5}) {
        Vec x = M.window().center() + f * M.window().halfwidths();
        INFO(kind << " f=" << f);
        CHECK(admissible_radius(M, x, 1, 0.1) <= admissible_radius(M, x, 0, 0.1) * (1 + 1e-3));
      }
    }
  }

  TEST_CASE("bisection trace separates admissible from rejected radii") {
    Manifold P = make_builtin("poincare_ball", 2);
    RadiusSearch s = search_radius(P, vec({0.2, 0.1}), 1, 0.1, BallSampler(2));
    double best_ok = 0, worst_bad = kInf;
    for (auto [R, ok] : s.trace) (ok ? best_ok : worst_bad) = ok ? std::max(best_ok, R) : std::min(worst_bad, R);
    CHECK(best_ok < worst_bad);
    CHECK(s.r_prime == doctest::Approx(best_ok));
    CHECK(s.trace.size() <= static_cast<std::size_t>(kBisectionMaxIter + 2));
  }

  TEST_CASE("sampler refinement barely moves the radius") {
    Manifold P = make_builtin("poincare_ball", 2);
    Manifold C = make_builtin("hyperbolic_cusp", 2);
    for (auto* M : {&P, &C}) {
      Vec x = M->window().center() + 0.3 * M->window().halfwidths();
      for (int cls : {0, 1}) {
        double a = admissible_radius(*M, x, cls, 0.1, 9), b = admissible_radius(*M, x, cls, 0.1, 10);
        CHECK(std::abs(a - b) / b < 0.02);
      }
    }
  }

  TEST_CASE("radius field") {
    Manifold P = make_builtin("poincare_ball", 2);
    RadiusField f(P, P.window(), {9, 9}, 0, 0.1);
    CHECK(f.size() == 81u);
    for (std::size_t i : {0u, 40u, 80u}) {
      CHECK(f.at(f.node(i)) == doctest::Approx(f.radius_at_node(i)));
      CHECK(f.exact(f.node(i)).radius == doctest::Approx(f.radius_at_node(i)));
    }
    Vec mid = 0.5 * (f.node(40) + f.node(41));
    double lo = std::min(f.radius_at_node(40), f.radius_at_node(41));
    double hi = std::max(f.radius_at_node(40), f.radius_at_node(41));
    CHECK(f.at(mid) >= lo - 1e-12);
    CHECK(f.at(mid) <= hi + 1e-12);
    CHECK(f.min_radius() <= f.max_radius());
    CHECK(f.max_radius() <= 1.0);

    auto pairs = sample_pairs(f, 200, 3);
    CHECK(pairs.size() == 200u);
    SlowVariationReport rep = verify_slow_variation(f, pairs);
    CHECK(rep.ok());
    CHECK(rep.worst_band <= 1.0);
  }
}
