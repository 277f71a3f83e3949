#include "wsob/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

namespace wsob {

double Quadrature::volume() const {
  double s = 0.0;
  for (double w : weights) s += w;
  return s;
}

namespace {

GaussRule compute_gauss(int m) {
  GaussRule r;
  r.x.resize(m);
  r.w.resize(m);
  for (int i = 0; i < m; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (m + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= m; ++k) {
        double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      double pm = m == 1 ? 1.0 : p0;
      if (m == 1) p1 = x;
      dp = m * (x * p1 - pm) / (x * x - 1);
      double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    r.x[m - 1 - i] = x;
    r.w[m - 1 - i] = 2.0 / ((1 - x * x) * dp * dp);
  }
  return r;
}

}  // namespace

const GaussRule& gauss_legendre(int m) {
  if (m < 1) throw ParameterError("need at least one quadrature node");
  static std::map<int, GaussRule> cache;
  static std::mutex mu;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(m);
  if (it == cache.end()) it = cache.emplace(m, compute_gauss(m)).first;
  return it->second;
}

Quadrature box_rule(const Box& b, int nodes) {
  Quadrature q;
  if (b.empty()) return q;
  if (!b.bounded()) throw ParameterError("quadrature needs a bounded box");
  const int n = b.dim();
  const GaussRule& g = gauss_legendre(nodes);
  std::size_t total = 1;
  for (int i = 0; i < n; ++i) total *= static_cast<std::size_t>(nodes);
  q.nodes.reserve(total);
  q.weights.reserve(total);
  Vec c = b.center(), h = b.halfwidths();
  for (std::size_t idx = 0; idx < total; ++idx) {
    std::size_t r = idx;
    Vec x(n);
    double w = 1.0;
    for (int a = n - 1; a >= 0; --a) {
      int k = static_cast<int>(r % nodes);
      r /= nodes;
      x[a] = c[a] + h[a] * g.x[k];
      w *= h[a] * g.w[k];
    }
    q.nodes.push_back(x);
    q.weights.push_back(w);
  }
  return q;
}

double BallRegion::coordinate_volume() const {
  const int n = static_cast<int>(center.size());
  return std::pow(std::numbers::pi, n / 2.0) / std::tgamma(n / 2.0 + 1.0) * std::pow(radius, n) *
         std::abs(L.determinant());
}

bool BallRegion::contains(const Vec& y) const {
  return L.lu().solve(Vec(y - center)).norm() < radius;
}

Box BallRegion::bounding_box() const {
  const int n = static_cast<int>(center.size());
  Vec h(n);
  for (int i = 0; i < n; ++i) h[i] = radius * L.row(i).norm();
  return Box::from_center(center, h);
}

Quadrature ball_rule(const BallRegion& ball, int nodes) {
  const int n = static_cast<int>(ball.center.size());
  const double R = ball.radius;
  const double J = std::abs(ball.L.determinant());
  const GaussRule& g = gauss_legendre(nodes);
  const double pi = std::numbers::pi;
  Quadrature q;
  auto push = [&](const Vec& z, double w) {
    q.nodes.push_back(ball.center + ball.L * z);
    q.weights.push_back(w * J);
  };
  if (n == 1) {
    for (int i = 0; i < nodes; ++i) push(Vec::Constant(1, R * g.x[i]), R * g.w[i]);
  } else if (n == 2) {
    const int m = 2 * nodes;
    for (int i = 0; i < nodes; ++i) {
      double rho = 0.5 * R * (g.x[i] + 1), wr = 0.5 * R * g.w[i] * rho;
      for (int k = 0; k < m; ++k) {
        double t = 2 * pi * (k + 0.5) / m;
        Vec z(2);
        z << rho * std::cos(t), rho * std::sin(t);
        push(z, wr * 2 * pi / m);
      }
    }
  } else if (n == 3) {
    const int m = 2 * nodes;
    for (int i = 0; i < nodes; ++i) {
      double rho = 0.5 * R * (g.x[i] + 1), wr = 0.5 * R * g.w[i] * rho * rho;
      for (int j = 0; j < nodes; ++j) {
        double ct = g.x[j], st = std::sqrt(1 - ct * ct);
        for (int k = 0; k < m; ++k) {
          double ph = 2 * pi * (k + 0.5) / m;
          Vec z(3);
          z << rho * st * std::cos(ph), rho * st * std::sin(ph), rho * ct;
          push(z, wr * g.w[j] * 2 * pi / m);
        }
      }
    }
  } else {
    Quadrature cube = box_rule(Box::from_center(Vec::Zero(n), Vec::Constant(n, R)), nodes);
    double kept = 0.0;
    for (std::size_t i = 0; i < cube.size(); ++i)
      if (cube.nodes[i].norm() < R) {
        push(cube.nodes[i], cube.weights[i]);
        kept += cube.weights[i];
      }
    double exact = ball.coordinate_volume() / J;
    for (double& w : q.weights) w *= exact / kept;
  }
  return q;
}

}  // namespace wsob
