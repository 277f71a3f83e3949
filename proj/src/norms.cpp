#include "wsob/norms.hpp"

#include "wsob/covering.hpp"
#include "wsob/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace wsob {

double Weight::at(const Vec& x) const {
  if (trivial()) return 1.0;
  return std::pow(field->at(x), exponent);
}

double weight_at(const Vec& x, double gamma, const RadiusField& field) {
  if (gamma == 0.0) return 1.0;
  return std::pow(field.at(x), gamma);
}

SobolevParams SobolevParams::make(int n, int m, int k, double r, double gamma) {
  if (n < 1) throw ParameterError("n must be positive");
  if (!(r >= 1.0)) throw ParameterError("r must be >= 1");
  if (m < k || k < 0) throw ParameterError("need m >= k >= 0");
  double inv = 1.0 / r - static_cast<double>(m - k) / n;
  if (!(inv > 0.0)) throw ParameterError("1/s = 1/r - (m-k)/n must be positive");
  SobolevParams p;
  p.n = n;
  p.m = m;
  p.k = k;
  p.r = r;
  p.s = 1.0 / inv;
  p.gamma = gamma;
  p.nu = p.s * (2.0 + gamma / r);
  return p;
}

double lp_integral(const Manifold& M, const Quadrature& q, double tau, const Weight& w,
                   const std::function<double(const Vec&)>& modulus) {
  if (!(tau >= 1.0)) throw ParameterError("exponent must be >= 1");
  double s = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) {
    const Vec& x = q.nodes[i];
    double f = modulus(x);
    if (f == 0.0) continue;
    double wt = w.at(x);
    if (wt < 0.0) throw NumericalError("negative weight");
    s += q.weights[i] * std::pow(f, tau) * wt * M.volume_element(x);
  }
  return std::pow(s, 1.0 / tau);
}

double lp_norm(const Manifold& M, const FormField& f, const Quadrature& q, double tau, const Weight& w) {
  const int p = f.degree();
  return lp_integral(M, q, tau, w, [&](const Vec& x) {
    if (!f.support().contains(x)) return 0.0;
    return form_norm(M.metric(x), p, f.value(x));
  });
}

Quadrature support_rule(const Manifold& M, const FormField& f, int nodes) {
  return box_rule(intersect(M.window(), f.support()), nodes);
}

double lp_norm(const Manifold& M, const FormField& f, const Box& region, double tau, const Weight& w, int nodes) {
  return lp_norm(M, f, box_rule(intersect(region, f.support()), nodes), tau, w);
}

double lp_norm(const Manifold& M, const FormField& f, const BallRegion& ball, double tau, const Weight& w,
               int nodes) {
  return lp_norm(M, f, ball_rule(ball, nodes), tau, w);
}

std::vector<double> sobolev_terms(const Manifold& M, const FormField& f, const Quadrature& q, int k, double r,
                                  const Weight& w) {
  if (k < 0 || k > 2) throw ParameterError("Sobolev order k must be 0, 1 or 2");
  if (!(r >= 1.0)) throw ParameterError("exponent must be >= 1");
  std::vector<double> acc(k + 1, 0.0);
  for (std::size_t i = 0; i < q.size(); ++i) {
    const Vec& x = q.nodes[i];
    if (!f.support().contains(x)) continue;
    Mat g = M.metric(x);
    double scale = q.weights[i] * w.at(x) * std::sqrt(g.determinant());
    for (int j = 0; j <= k; ++j) {
      double v = j == 0 ? form_norm(g, f.degree(), f.value(x)) : pointwise_norm(g, nabla(M, f, x, j));
      if (v != 0.0) acc[j] += scale * std::pow(v, r);
    }
  }
  for (double& a : acc) a = std::pow(a, 1.0 / r);
  return acc;
}

double sobolev_norm(const Manifold& M, const FormField& f, const Quadrature& q, int k, double r, const Weight& w) {
  auto t = sobolev_terms(M, f, q, k, r, w);
  double s = 0.0;
  for (double v : t) s += v;
  return s;
}

double sobolev_norm(const Manifold& M, const FormField& f, const Box& region, int k, double r, const Weight& w,
                    int nodes) {
  return sobolev_norm(M, f, box_rule(intersect(region, f.support()), nodes), k, r, w);
}

double sobolev_norm(const Manifold& M, const FormField& f, const BallRegion& ball, int k, double r,
                    const Weight& w, int nodes) {
  return sobolev_norm(M, f, ball_rule(ball, nodes), k, r, w);
}

BallRegion ball_region(const AdmissibleBall& b, double scale) {
  return BallRegion{b.frame.center, b.frame.L, b.radius * scale};
}

ChartComparison chart_comparison(const Manifold& M, const FormField& f, const AdmissibleBall& ball, double r,
                                 int nodes) {
  const int n = M.dim();
  const double eps = ball.epsilon, R = ball.radius;
  if (!is_admissible(M, ball.frame.center, R, ball.cls, eps, BallSampler(n), ball.frame).ok)
    throw ParameterError("ball is not admissible");
  ChartComparison c;
  auto m = sobolev_terms(M, f, ball_rule(ball_region(ball), nodes), 1, r);
  c.m_L = m[0];
  c.m_grad = m[1];
  c.m_W = m[0] + m[1];
  Manifold E = make_builtin("euclidean", n, {}, Box::from_center(Vec::Zero(n), Vec::Constant(n, 1.1 * (1 + eps) * R)));
  FormField v = pullback_affine(f, ball.frame.center, ball.frame.L);
  auto flat = [&](double t, double& L, double& G, double& W) {
    auto s = sobolev_terms(E, v, ball_rule(BallRegion{Vec::Zero(n), Mat::Identity(n, n), t * R}, nodes), 1, r);
    L = s[0];
    G = s[1];
    W = s[0] + s[1];
  };
  flat(1 - eps, c.inner_L, c.inner_grad, c.inner_W);
  flat(1.0, c.same_L, c.same_grad, c.same_W);
  flat(1 + eps, c.outer_L, c.outer_grad, c.outer_W);
  if (c.outer_W > 0) {
    c.factor_up = c.m_W / c.outer_W;
    c.c_up = (c.factor_up * R - 1) / eps;
  }
  if (c.m_W > 0) {
    c.factor_down = c.inner_W / c.m_W;
    c.c_down = (c.factor_down * R - 1) / eps;
  }
  return c;
}

LocalizationReport localization_check(const Manifold& M, const FormField& f, const Covering& cover, double tau,
                                      double mu, const RadiusField& field, double T) {
  const Box& sup = f.support();
  for (int i = 0; i < M.dim(); ++i)
    if (sup.lo[i] < cover.region.lo[i] || sup.hi[i] > cover.region.hi[i])
      throw ParameterError("field support is not inside the covered region");
  LocalizationReport rep;
  Weight w{&field, mu};
  rep.global = std::pow(lp_norm(M, f, box_rule(sup, kWindowNodes), tau, w), tau);
  for (std::size_t i = 0; i < cover.size(); ++i) {
    NormalizedFrame F = NormalizedFrame::at(M, cover.centers[i]);
    BallRegion B{F.center, F.L, cover.radius(i)};
    Box bb = B.bounding_box();
    if (intersect(bb, sup).empty()) continue;
    double part = std::pow(lp_norm(M, f, B, tau), tau);
    if (part == 0.0) continue;
    rep.covering_sum += std::pow(cover.radius(i), mu) * part;
    ++rep.balls_used;
  }
  rep.ratio = rep.global > 0 ? rep.covering_sum / rep.global : 0.0;
  rep.lower = std::pow(2.0, -std::abs(mu));
  rep.upper = std::pow(2.0, std::abs(mu)) * T;
  rep.ok = rep.global == 0.0 || (rep.ratio >= rep.lower && rep.ratio <= rep.upper);
  return rep;
}

bool lp_sequence_compare(const std::vector<double>& a, double r, double s) {
  if (!(r >= 1.0 && s >= 1.0)) throw ParameterError("exponents must be >= 1");
  if (r < s) throw ParameterError("need r >= s");
  double sr = 0.0, ss = 0.0;
  for (double v : a) {
    if (v < 0.0) throw ParameterError("sequence must be nonnegative");
    sr += std::pow(v, r);
    ss += std::pow(v, s);
  }
  return sr <= std::pow(ss, r / s) * (1 + 1e-12);
}

HolderReport holder_ball_check(const Manifold& M, const FormField& f, const AdmissibleBall& ball, double r, double s,
                               double slack, int nodes) {
  if (!(s >= r && r >= 1.0)) throw ParameterError("need s >= r >= 1");
  const int n = M.dim();
  HolderReport h;
  Quadrature q = ball_rule(ball_region(ball), nodes);
  h.lhs = lp_norm(M, f, q, r);
  double Ls = lp_norm(M, f, q, s);
  h.rhs = std::pow(ball.radius, n / r - n / s) * Ls;
  h.envelope = std::pow(std::pow(1 + ball.epsilon, n / 2.0) * unit_ball_volume(n), 1 / r - 1 / s);
  if (Ls == 0.0) {
    h.vacuous = true;
    return h;
  }
  h.c = h.lhs / h.rhs;
  h.ok = h.c <= (1 + slack) * h.envelope;
  return h;
}

}  // namespace wsob
