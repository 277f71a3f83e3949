#include "wsob/admissible.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace wsob {

Admissibility is_admissible(const Manifold& M, const Vec& x, double R, int cls, double eps,
                            const BallSampler& sampler) {
  return is_admissible(M, x, R, cls, eps, sampler, NormalizedFrame::at(M, x));
}

Admissibility is_admissible(const Manifold& M, const Vec& x, double R, int cls, double eps,
                            const BallSampler& sampler, const NormalizedFrame& F) {
  if (!(R > 0.0)) throw ParameterError("radius must be positive");
  if (cls != 0 && cls != 1) throw ParameterError("class must be 0 or 1");
  if (!(eps > 0.0 && eps < 0.5)) throw ParameterError("epsilon must be in (0, 1/2)");
  const int n = M.dim();
  const Chart& chart = M.window_chart();
  Admissibility a;
  a.margin0 = eps;
  a.margin1 = eps;
  if (!(R < chart.domain.max_normalized_radius(x, F.L))) {
    a.ok = false;
    a.reason = "leaves chart";
    return a;
  }
  Vec sup = Vec::Zero(n);
  for (const Vec& z : sampler.points()) {
    Vec y = F.center + F.L * (R * z);
    Mat gt = F.L * chart.metric(y) * F.L;
    EigenRange er = eigen_range(gt);
    a.eig_min = std::min(a.eig_min, er.min);
    a.eig_max = std::max(a.eig_max, er.max);
    a.margin0 = std::min({a.margin0, er.min - (1 - eps), (1 + eps) - er.max});
    if (a.margin0 < 0.0) {
      a.ok = false;
      a.reason = "(*)";
      return a;
    }
    if (cls == 1) {
      Rank3 dg = chart.partials ? chart.partials(y) : fd_partials(chart, y);
      for (int k = 0; k < n; ++k) {
        Mat s = Mat::Zero(n, n);
        for (int b = 0; b < n; ++b) s += F.L(b, k) * dg.slice(b);
        s = F.L * s * F.L;
        sup[k] = std::max(sup[k], s.cwiseAbs().maxCoeff());
      }
    }
  }
  if (cls == 1) {
    a.dg_term = R * sup.sum();
    a.margin1 = eps - a.dg_term;
    if (a.margin1 < 0.0) {
      a.ok = false;
      a.reason = "(**)";
    }
  }
  return a;
}

RadiusSearch search_radius(const Manifold& M, const Vec& x, int cls, double eps, const BallSampler& sampler) {
  NormalizedFrame F = NormalizedFrame::at(M, x);
  RadiusSearch s;
  double dom = M.window_chart().domain.max_normalized_radius(x, F.L);
  s.r_max = std::min(kRadiusCap, dom * (1 - 1e-9));
  if (!(s.r_max > 1e-6)) throw NumericalError("degenerate point");
  double lo = 0.0, hi = s.r_max;
  bool top = is_admissible(M, x, hi, cls, eps, sampler, F).ok;
  s.trace.emplace_back(hi, top);
  if (top) {
    lo = hi;
  } else {
    for (int it = 0; it < kBisectionMaxIter; ++it) {
      if (lo > 0.0 && hi - lo <= kBisectionTol * hi) break;
      double mid = 0.5 * (lo + hi);
      bool ok = is_admissible(M, x, mid, cls, eps, sampler, F).ok;
      s.trace.emplace_back(mid, ok);
      (ok ? lo : hi) = mid;
    }
  }
  if (lo < 1e-6) throw NumericalError("degenerate point");
  s.r_prime = lo;
  s.radius = std::min(1.0, lo / 2);
  return s;
}

double admissible_radius(const Manifold& M, const Vec& x, int cls, double eps, int sampler_level) {
  BallSampler S(M.dim(), sampler_level);
  return search_radius(M, x, cls, eps, S).radius;
}

double admissible_radius(const Manifold& M, const Point& p, int cls, double eps, int sampler_level) {
  if (p.chart != M.window_chart().id) throw ParameterError("point is not on the window chart");
  return admissible_radius(M, p.coords, cls, eps, sampler_level);
}

AdmissibleBall make_ball(const Manifold& M, const Vec& x, double R, int cls, double eps) {
  return AdmissibleBall{M.point(x), R, cls, eps, NormalizedFrame::at(M, x)};
}

RadiusField::RadiusField(const Manifold& M, const Box& box, std::vector<int> dims, int cls, double eps,
                         int sampler_level)
    : M_(M), box_(box), dims_(std::move(dims)), cls_(cls), eps_(eps), level_(sampler_level),
      sampler_(M.dim(), sampler_level) {
  if (static_cast<int>(dims_.size()) != M.dim()) throw ParameterError("grid dims do not match n");
  std::size_t N = 1;
  for (int d : dims_) {
    if (d < 1) throw ParameterError("grid dims must be positive");
    N *= static_cast<std::size_t>(d);
  }
  R_.resize(N);
  Rp_.resize(N);
  for (std::size_t i = 0; i < N; ++i) {
    RadiusSearch s = search_radius(M_, node(i), cls_, eps_, sampler_);
    R_[i] = s.radius;
    Rp_[i] = s.r_prime;
  }
  for (std::size_t i = 0; i < N; ++i) {
    logR_.push_back(std::log(R_[i]));
    logRp_.push_back(std::log(Rp_[i]));
  }
}

RadiusField RadiusField::over_window(const Manifold& M, int cls, double eps, int per_axis, int sampler_level) {
  if (per_axis <= 0) per_axis = M.dim() == 1 ? 65 : M.dim() == 2 ? 33 : M.dim() == 3 ? 9 : 5;
  return RadiusField(M, M.window(), std::vector<int>(M.dim(), per_axis), cls, eps, sampler_level);
}

Vec RadiusField::node(std::size_t i) const {
  const int n = M_.dim();
  Vec x(n);
  for (int a = n - 1; a >= 0; --a) {
    int k = static_cast<int>(i % dims_[a]);
    i /= dims_[a];
    x[a] = dims_[a] == 1 ? box_.center()[a] : box_.lo[a] + (box_.hi[a] - box_.lo[a]) * k / (dims_[a] - 1);
  }
  return x;
}

double RadiusField::interp(const std::vector<double>& v, const Vec& x) const {
  const int n = M_.dim();
  int base[kMaxDim];
  double frac[kMaxDim];
  for (int a = 0; a < n; ++a) {
    if (dims_[a] == 1) {
      base[a] = 0;
      frac[a] = 0.0;
      continue;
    }
    double t = (x[a] - box_.lo[a]) / (box_.hi[a] - box_.lo[a]) * (dims_[a] - 1);
    t = std::clamp(t, 0.0, static_cast<double>(dims_[a] - 1));
    base[a] = std::min(static_cast<int>(t), dims_[a] - 2);
    frac[a] = t - base[a];
  }
  double s = 0.0;
  for (unsigned corner = 0; corner < (1u << n); ++corner) {
    double w = 1.0;
    std::size_t idx = 0;
    for (int a = 0; a < n; ++a) {
      int up = (corner >> a) & 1u;
      if (dims_[a] == 1 && up) {
        w = 0.0;
        break;
      }
      w *= up ? frac[a] : 1.0 - frac[a];
      idx = idx * dims_[a] + base[a] + up;
    }
    if (w != 0.0) s += w * v[idx];
  }
  return s;
}

double RadiusField::at(const Vec& x) const { return std::exp(interp(logR_, x)); }
double RadiusField::prime_at(const Vec& x) const { return std::exp(interp(logRp_, x)); }

RadiusSearch RadiusField::exact(const Vec& x) const { return search_radius(M_, x, cls_, eps_, sampler_); }

double RadiusField::min_radius() const { return *std::min_element(R_.begin(), R_.end()); }
double RadiusField::max_radius() const { return *std::max_element(R_.begin(), R_.end()); }

std::vector<std::pair<Vec, Vec>> sample_pairs(const RadiusField& field, std::size_t count, std::uint64_t seed,
                                              const Box* region) {
  const Manifold& M = field.manifold();
  const int n = M.dim();
  const Box& box = region ? *region : field.box();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  std::normal_distribution<double> N(0.0, 1.0);
  std::vector<std::pair<Vec, Vec>> out;
  while (out.size() < count) {
    Vec x(n);
    for (int a = 0; a < n; ++a) x[a] = box.lo[a] + (box.hi[a] - box.lo[a]) * U(rng);
    double R = field.at(x);
    Vec dir(n);
    for (int a = 0; a < n; ++a) dir[a] = N(rng);
    double rad = R / (1 + field.epsilon()) * std::pow(U(rng), 1.0 / n);
    Vec y = x + NormalizedFrame::at(M, x).L * (rad * dir.normalized());
    if (!field.box().contains(y)) continue;
    out.emplace_back(x, y);
  }
  return out;
}

SlowVariationReport verify_slow_variation(const RadiusField& field, const std::vector<std::pair<Vec, Vec>>& pairs,
                                          double slack) {
  SlowVariationReport rep;
  rep.slack = slack;
  const double eps = field.epsilon();
  for (const auto& [x, y] : pairs) {
    SlowVariationRow row;
    row.x = x;
    row.y = y;
    RadiusSearch sx = field.exact(x), sy = field.exact(y);
    row.rx = sx.radius;
    row.ry = sy.radius;
    row.rpx = sx.r_prime;
    row.rpy = sy.r_prime;
    row.dist = NormalizedFrame::at(field.manifold(), x).normal_distance(y);
    double q = std::max(row.ry / row.rx, row.rx / row.ry) / 2;
    rep.worst_band = std::max(rep.worst_band, q);
    row.band_ok = q <= 1 + slack;
    double dr = std::abs(row.rpy - row.rpx);
    double allowed = (1 + eps) * row.dist;
    double tol = kBisectionTol * (row.rpx + row.rpy);
    if (allowed > 0.0) rep.worst_lipschitz = std::max(rep.worst_lipschitz, (dr - tol) / allowed);
    row.lipschitz_ok = dr <= (1 + slack) * allowed + tol;
    rep.band_violations += !row.band_ok;
    rep.lipschitz_violations += !row.lipschitz_ok;
    rep.rows.push_back(row);
  }
  rep.pairs = pairs.size();
  return rep;
}

}  // namespace wsob
