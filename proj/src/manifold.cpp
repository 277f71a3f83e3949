#include "wsob/manifold.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

namespace wsob {

using nlohmann::json;

ChartDomain ChartDomain::make_box(const Box& b) {
  ChartDomain d;
  d.kind = Kind::box;
  d.box = b;
  d.period = Vec::Zero(b.dim());
  return d;
}

ChartDomain ChartDomain::make_ball(const Vec& center, double radius) {
  ChartDomain d;
  d.kind = Kind::ball;
  d.ball_center = center;
  d.ball_radius = radius;
  d.period = Vec::Zero(center.size());
  return d;
}

int ChartDomain::dim() const {
  return kind == Kind::box ? box.dim() : static_cast<int>(ball_center.size());
}

bool ChartDomain::contains(const Vec& x) const {
  if (x.size() != dim()) return false;
  if (kind == Kind::ball) return (x - ball_center).norm() < ball_radius;
  for (int i = 0; i < dim(); ++i) {
    if (periodic(i)) continue;
    if (x[i] < box.lo[i] || x[i] > box.hi[i]) return false;
  }
  return true;
}

bool ChartDomain::contains(const Box& b) const {
  const int n = dim();
  if (b.dim() != n) return false;
  if (kind == Kind::ball) {
    // farthest corner from the ball center
    Vec far(n);
    for (int i = 0; i < n; ++i)
      far[i] = std::max(std::abs(b.lo[i] - ball_center[i]), std::abs(b.hi[i] - ball_center[i]));
    return far.norm() <= ball_radius;
  }
  for (int i = 0; i < n; ++i) {
    if (periodic(i)) {
      if (b.hi[i] - b.lo[i] > period[i] * (1 + 1e-12)) return false;
      continue;
    }
    if (b.lo[i] < box.lo[i] || b.hi[i] > box.hi[i]) return false;
  }
  return true;
}

double ChartDomain::max_normalized_radius(const Vec& c, const Mat& L) const {
  if (!contains(c)) return 0.0;
  const int n = dim();
  if (kind == Kind::ball) {
    Eigen::JacobiSVD<Mat> svd(L);
    return (ball_radius - (c - ball_center).norm()) / svd.singularValues()[0];
  }
  double r = kInf;
  for (int i = 0; i < n; ++i) {
    double e = L.row(i).norm();
    if (e == 0.0) continue;
    if (periodic(i)) {
      r = std::min(r, 0.5 * period[i] / e);
      continue;
    }
    if (std::isfinite(box.lo[i])) r = std::min(r, (c[i] - box.lo[i]) / e);
    if (std::isfinite(box.hi[i])) r = std::min(r, (box.hi[i] - c[i]) / e);
  }
  return r;
}

double ChartDomain::boundary_distance(const Vec& x) const {
  if (kind == Kind::ball) return ball_radius - (x - ball_center).norm();
  double d = kInf;
  for (int i = 0; i < dim(); ++i) {
    if (periodic(i)) continue;
    d = std::min({d, x[i] - box.lo[i], box.hi[i] - x[i]});
  }
  return d;
}

Manifold::Manifold(int n, std::vector<Chart> charts, std::string window_chart, Box window)
    : n_(n), charts_(std::move(charts)), window_(std::move(window)) {
  if (n < 1 || n > kMaxDim) throw ParameterError("dimension must be in 1.." + std::to_string(kMaxDim));
  if (window_.dim() != n) throw ParameterError("window dimension mismatch");
  if (!window_.bounded() || window_.empty()) throw ParameterError("window must be a bounded, non-empty box");
  int hits = 0;
  bool found = false;
  for (std::size_t i = 0; i < charts_.size(); ++i) {
    if (charts_[i].domain.dim() != n) throw ParameterError("chart '" + charts_[i].id + "' has wrong dimension");
    if (charts_[i].id == window_chart) {
      window_idx_ = i;
      found = true;
    }
    if (charts_[i].domain.contains(window_)) ++hits;
  }
  if (!found) throw ParameterError("unknown window chart '" + window_chart + "'");
  if (!charts_[window_idx_].domain.contains(window_))
    throw ParameterError("window is not inside the chart domain (touches a singular locus or edge)");
  if (hits != 1) throw ParameterError("window must lie in exactly one chart domain");
  Mat g = charts_[window_idx_].metric(window_.center());
  if (g.rows() != n || g.cols() != n) throw ParameterError("metric dimension does not match n");
  cover_window_ = window_;
}

void Manifold::set_cover_window(const Box& b) {
  if (b.dim() != n_ || !window_chart().domain.contains(b))
    throw ParameterError("cover window is not inside the chart domain");
  cover_window_ = b;
}

const Chart& Manifold::chart(const std::string& id) const {
  for (const auto& c : charts_)
    if (c.id == id) return c;
  throw ParameterError("unknown chart '" + id + "'");
}

double Manifold::oracle(const std::string& name, double arg) const {
  auto it = oracles_.find(name);
  if (it == oracles_.end()) throw ParameterError("no oracle '" + name + "'");
  return it->second(arg);
}

Mat Manifold::metric(const Vec& x) const {
  const Chart& c = window_chart();
  if (!c.domain.contains(x)) throw DomainError("point outside chart domain");
  return c.metric(x);
}

Rank3 fd_partials(const Chart& chart, const Vec& x, double h) {
  const int n = static_cast<int>(x.size());
  if (chart.domain.boundary_distance(x) <= h)
    throw DomainError("point too close to the domain boundary for the difference stencil");
  Rank3 d(n);
  for (int k = 0; k < n; ++k) {
    Vec xp = x, xm = x;
    xp[k] += h;
    xm[k] -= h;
    Mat dg = (chart.metric(xp) - chart.metric(xm)) / (2 * h);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) d(k, i, j) = dg(i, j);
  }
  return d;
}

Rank3 Manifold::partials(const Vec& x) const {
  const Chart& c = window_chart();
  if (!c.domain.contains(x)) throw DomainError("point outside chart domain");
  if (c.partials) return c.partials(x);
  return fd_partials(c, x);
}

double Manifold::volume_element(const Vec& x) const {
  double det = metric(x).determinant();
  if (!(det > 0.0)) throw NumericalError("metric is not positive definite");
  return std::sqrt(det);
}

Mat metric_at(const Manifold& M, const Point& p) {
  const Chart& c = M.chart(p.chart);
  if (!c.domain.contains(p.coords)) throw DomainError("point outside chart domain");
  Mat g = c.metric(p.coords);
  return 0.5 * (g + g.transpose());
}

Rank3 metric_partials_at(const Manifold& M, const Point& p) {
  const Chart& c = M.chart(p.chart);
  if (!c.domain.contains(p.coords)) throw DomainError("point outside chart domain");
  if (c.partials) return c.partials(p.coords);
  return fd_partials(c, p.coords);
}

double volume_element(const Manifold& M, const Point& p) {
  Mat g = metric_at(M, p);
  Eigen::SelfAdjointEigenSolver<Mat> es(g, Eigen::EigenvaluesOnly);
  if (!(es.eigenvalues().minCoeff() > 0.0)) throw NumericalError("metric is not positive definite");
  return std::sqrt(g.determinant());
}

double unit_ball_volume(int n) {
  return std::pow(std::numbers::pi, n / 2.0) / std::tgamma(n / 2.0 + 1.0);
}

namespace {

double param(const std::map<std::string, double>& p, const std::string& key, double dflt) {
  auto it = p.find(key);
  return it == p.end() ? dflt : it->second;
}

Box default_window(const std::string& kind, int n, const std::map<std::string, double>& p) {
  if (kind == "hyperbolic_cusp") {
    Vec c = Vec::Zero(n), h = Vec::Constant(n, 1.0);
    double T = param(p, "T", 10.0);
    c[0] = std::min(4.25, 0.5 * T);
    h[0] = std::min(3.25, 0.5 * T - 0.05);
    if (n > 1) {
      c[1] = std::numbers::pi;
      h[1] = std::numbers::pi;
    }
    return Box::from_center(c, h);
  }
  if (kind == "poincare_ball") return Box::from_center(Vec::Zero(n), Vec::Constant(n, 0.5 / std::sqrt(n)));
  return Box::from_center(Vec::Zero(n), Vec::Constant(n, 1.0));
}

// g = f(x) * identity with f and grad f supplied.
Chart conformal_chart(std::string id, ChartDomain dom, std::function<double(double)> f,
                      std::function<double(double)> df_dr2) {
  Chart c;
  c.id = std::move(id);
  c.domain = std::move(dom);
  c.metric = [f](const Vec& x) {
    const int n = static_cast<int>(x.size());
    return Mat(f(x.squaredNorm()) * Mat::Identity(n, n));
  };
  c.partials = [df_dr2](const Vec& x) {
    const int n = static_cast<int>(x.size());
    Rank3 d(n);
    double s = df_dr2(x.squaredNorm());
    for (int k = 0; k < n; ++k)
      for (int i = 0; i < n; ++i) d(k, i, i) = 2.0 * x[k] * s;
    return d;
  };
  return c;
}

}  // namespace

Manifold make_builtin(const std::string& kind, int n, const std::map<std::string, double>& params,
                      std::optional<Box> window) {
  if (n < 1 || n > kMaxDim) throw ParameterError("dimension must be in 1.." + std::to_string(kMaxDim));
  Box win = window ? *window : default_window(kind, n, params);
  if (win.dim() != n) throw ParameterError("window dimension mismatch");
  const double pi = std::numbers::pi;
  std::vector<Chart> charts;
  std::map<std::string, Oracle> oracles;

  if (kind == "euclidean") {
    Chart c;
    c.id = "main";
    c.domain = ChartDomain::make_box(Box::unbounded(n));
    c.metric = [n](const Vec&) { return Mat(Mat::Identity(n, n)); };
    c.partials = [n](const Vec&) { return Rank3(n); };
    charts.push_back(std::move(c));
    oracles["sectional_curvature"] = [](double) { return 0.0; };
    oracles["geodesic_ball_volume"] = [n](double rho) { return unit_ball_volume(n) * std::pow(rho, n); };
    oracles["geodesic_radius_to_coord"] = [](double rho) { return rho; };
  } else if (kind == "poincare_ball") {
    double margin = param(params, "margin", 0.05);
    if (margin < 0.05 || margin >= 1.0) throw ParameterError("poincare_ball margin must be in [0.05, 1)");
    charts.push_back(conformal_chart(
        "main", ChartDomain::make_ball(Vec::Zero(n), 1.0 - margin),
        [](double r2) { return 4.0 / ((1 - r2) * (1 - r2)); },
        [](double r2) { return 8.0 / std::pow(1 - r2, 3); }));
    oracles["sectional_curvature"] = [](double) { return -1.0; };
    oracles["geodesic_radius_to_coord"] = [](double rho) { return std::tanh(rho / 2); };
    if (n == 2) oracles["geodesic_ball_volume"] = [pi](double rho) { return 4 * pi * std::pow(std::sinh(rho / 2), 2); };
  } else if (kind == "sphere_stereo") {
    double a = param(params, "extent", 3.0);
    if (!(a > 0.0) || !std::isfinite(a)) throw ParameterError("sphere_stereo needs a finite positive extent");
    charts.push_back(conformal_chart(
        "main", ChartDomain::make_box(Box::from_center(Vec::Zero(n), Vec::Constant(n, a))),
        [](double r2) { return 4.0 / ((1 + r2) * (1 + r2)); },
        [](double r2) { return -8.0 / std::pow(1 + r2, 3); }));
    oracles["sectional_curvature"] = [](double) { return 1.0; };
    oracles["geodesic_radius_to_coord"] = [](double rho) { return std::tan(rho / 2); };
    if (n == 2) oracles["geodesic_ball_volume"] = [pi](double rho) { return 2 * pi * (1 - std::cos(rho)); };
  } else if (kind == "hyperbolic_cusp") {
    if (n < 2) throw ParameterError("hyperbolic_cusp needs n >= 2");
    double T = param(params, "T", 10.0);
    if (!(T > 0.0) || !std::isfinite(T)) throw ParameterError("hyperbolic_cusp needs a finite T > 0");
    Chart c;
    c.id = "main";
    Box dom = Box::unbounded(n);
    dom.lo[0] = 0.0;
    dom.hi[0] = T;
    dom.lo[1] = 0.0;
    dom.hi[1] = 2 * pi;
    c.domain = ChartDomain::make_box(dom);
    c.domain.period[1] = 2 * pi;
    c.metric = [n](const Vec& x) {
      Mat g = Mat::Identity(n, n);
      g(1, 1) = std::exp(-2 * x[0]);
      return g;
    };
    c.partials = [n](const Vec& x) {
      Rank3 d(n);
      d(0, 1, 1) = -2 * std::exp(-2 * x[0]);
      return d;
    };
    charts.push_back(std::move(c));
    if (n == 2) oracles["sectional_curvature"] = [](double) { return -1.0; };
  } else {
    throw ParameterError("unknown manifold kind '" + kind + "'");
  }

  Manifold M(n, std::move(charts), "main", win);
  for (auto& [k, f] : oracles) M.add_oracle(k, f);
  ManifoldSpec spec;
  spec.kind = kind;
  spec.n = n;
  spec.params = params;
  spec.window_center = win.center();
  spec.window_halfwidths = win.halfwidths();
  M.set_spec(spec);
  return M;
}

Manifold make_manifold(const ManifoldSpec& spec) {
  Manifold M = make_builtin(spec.kind, spec.n, spec.params,
                            Box::from_center(spec.window_center, spec.window_halfwidths));
  if (spec.cover_window) M.set_cover_window(*spec.cover_window);
  M.set_spec(spec);
  return M;
}

Manifold load_manifold(const std::string& path) { return make_manifold(ManifoldSpec::load(path)); }

namespace {

Vec vec_from(const json& j, const char* what) {
  if (!j.is_array()) throw ParameterError(std::string(what) + " must be an array");
  Vec v(static_cast<int>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<int>(i)] = j[i].get<double>();
  return v;
}

json vec_to(const Vec& v) {
  json a = json::array();
  for (int i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

}  // namespace

std::string ManifoldSpec::to_json() const {
  json j;
  j["kind"] = kind;
  j["n"] = n;
  j["params"] = json::object();
  for (const auto& [k, v] : params) j["params"][k] = v;
  j["window"] = {{"center", vec_to(window_center)}, {"halfwidths", vec_to(window_halfwidths)}};
  if (cover_window)
    j["cover_window"] = {{"center", vec_to(cover_window->center())},
                         {"halfwidths", vec_to(cover_window->halfwidths())}};
  return j.dump();
}

ManifoldSpec ManifoldSpec::from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParameterError(std::string("manifold spec: ") + e.what());
  }
  ManifoldSpec s;
  try {
    s.kind = j.at("kind").get<std::string>();
    s.n = j.at("n").get<int>();
    if (j.contains("params"))
      for (auto& [k, v] : j["params"].items()) s.params[k] = v.get<double>();
    if (j.contains("window")) {
      s.window_center = vec_from(j["window"].at("center"), "window.center");
      s.window_halfwidths = vec_from(j["window"].at("halfwidths"), "window.halfwidths");
    } else {
      Box w = default_window(s.kind, s.n, s.params);
      s.window_center = w.center();
      s.window_halfwidths = w.halfwidths();
    }
    if (j.contains("cover_window"))
      s.cover_window = Box::from_center(vec_from(j["cover_window"].at("center"), "cover_window.center"),
                                        vec_from(j["cover_window"].at("halfwidths"), "cover_window.halfwidths"));
  } catch (const json::exception& e) {
    throw ParameterError(std::string("manifold spec: ") + e.what());
  }
  if (s.window_center.size() != s.n || s.window_halfwidths.size() != s.n)
    throw ParameterError("manifold spec: window has wrong dimension");
  return s;
}

ManifoldSpec ManifoldSpec::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParameterError("cannot open manifold spec '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return from_json(ss.str());
}

}  // namespace wsob
