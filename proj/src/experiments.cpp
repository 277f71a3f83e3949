#include "wsob/experiments.hpp"

#include "wsob/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <random>
#include <sstream>

namespace wsob {

using nlohmann::json;

namespace {

json vec_json(const Vec& v) {
  json a = json::array();
  for (int i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  std::size_t k = v.size() / 2;
  return v.size() % 2 ? v[k] : 0.5 * (v[k - 1] + v[k]);
}

double spread_of(const std::vector<double>& v) {
  if (v.empty()) return 1.0;
  auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  return *lo > 0.0 ? *hi / *lo : std::numeric_limits<double>::infinity();
}

// amp * (1 + sum_a b_a (x_a - c_a) / h_a) over the finite axes of h.
ScalarField coefficient(std::mt19937_64& rng, const Bump& b, const Vec& h, bool modulate) {
  std::uniform_real_distribution<double> U(0.0, 1.0);
  const int n = static_cast<int>(b.center.size());
  double amp = (0.5 + U(rng)) * (U(rng) < 0.5 ? -1.0 : 1.0);
  Polynomial p = Polynomial::constant(n, 1.0);
  if (modulate) {
    for (int a = 0; a < n; ++a) {
      if (!std::isfinite(h[a]) || h[a] <= 0.0) continue;
      double slope = 0.8 * U(rng) - 0.4;
      p.terms[0].coef -= slope * b.center[a] / h[a];
      Monomial m{slope / h[a], {}};
      m.pow[a] = 1;
      p.terms.push_back(m);
    }
  }
  return ScalarField::modulated(b, p, amp);
}

FormField bump_form(std::mt19937_64& rng, int n, int degree, const Bump& b, bool modulate) {
  Vec h = b.support().halfwidths();
  std::vector<ScalarField> coeffs;
  for (int i = 0; i < binom(n, degree); ++i) coeffs.push_back(coefficient(rng, b, h, modulate));
  return make_form(n, degree, std::move(coeffs));
}

void require_admissible(const Manifold& M, const AdmissibleBall& b) {
  if (!is_admissible(M, b.frame.center, b.radius, b.cls, b.epsilon, BallSampler(M.dim()), b.frame).ok)
    throw ParameterError("ball is not admissible");
}

double embedding_exponent(int n, double r) {
  double inv = 1.0 / r - 1.0 / n;
  if (!(inv > 0.0)) throw ParameterError("need 1/r - 1/n > 0");
  return 1.0 / inv;
}

}  // namespace

json& ExperimentReport::add_row(const std::string& id, double lhs, double rhs, const json& extra_keys) {
  double ratio = rhs > 0.0 ? lhs / rhs : (lhs == 0.0 ? 0.0 : std::numeric_limits<double>::infinity());
  json row = {{"field_id", id}, {"lhs", lhs}, {"rhs", rhs}, {"ratio", ratio}};
  for (auto it = extra_keys.begin(); it != extra_keys.end(); ++it) row[it.key()] = it.value();
  rows.push_back(std::move(row));
  return rows.back();
}

json ExperimentReport::to_json() const {
  json j;
  j["experiment"] = experiment;
  j["manifold"] = manifold;
  j["params"] = params;
  j["rows"] = rows;
  json s = summary;
  s["passed"] = passed;
  j["summary"] = s;
  j["runtime_ms"] = runtime_ms ? json(*runtime_ms) : json(nullptr);
  for (auto it = extra.begin(); it != extra.end(); ++it) j[it.key()] = it.value();
  return j;
}

std::string ExperimentReport::dump(int indent) const { return to_json().dump(indent); }

json manifold_json(const Manifold& M) { return json::parse(M.spec().to_json()); }

std::vector<NamedField> bump_suite(int n, const Box& region, const SuiteOptions& opt) {
  if (!region.bounded() || region.empty()) throw ParameterError("suite region must be a bounded box");
  std::mt19937_64 rng(opt.seed);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  std::vector<NamedField> out;
  Vec ext = region.hi - region.lo;
  for (int i = 0; i < opt.count; ++i) {
    bool slab = n >= 2 && (opt.shape == SuiteShape::slab || (opt.shape == SuiteShape::mixed && i % 2 == 1));
    Vec h(n), c(n);
    for (int a = 0; a < n; ++a) {
      h[a] = std::min(opt.width * opt.scale * ext[a] * (0.7 + 0.6 * U(rng)), 0.45 * ext[a]);
      c[a] = region.lo[a] + h[a] + U(rng) * (ext[a] - 2 * h[a]);
    }
    if (slab) {
      h[opt.slab_axis] = kInf;
      c[opt.slab_axis] = region.center()[opt.slab_axis];
    }
    Bump b = Bump::ellipsoid(c, h);
    out.push_back({"f" + std::to_string(i), bump_form(rng, n, opt.degree, b, true), c});
  }
  return out;
}

std::vector<NamedField> adapted_suite(const Manifold& M, const RadiusField& field, const std::vector<Vec>& centers,
                                      int degree, double kappa, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<NamedField> out;
  for (std::size_t i = 0; i < centers.size(); ++i) {
    const Vec& c = centers[i];
    Bump b = Bump::ellipsoid(c, NormalizedFrame::at(M, c).L, kappa * field.at(c));
    out.push_back({"a" + std::to_string(i), bump_form(rng, M.dim(), degree, b, true), c});
  }
  return out;
}

std::vector<Vec> adapted_centers(const Manifold& M, const RadiusField& field, int count, double kappa,
                                 std::uint64_t seed) {
  const int n = M.dim();
  const Box& win = M.window();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  std::vector<Vec> out;
  for (int tries = 0; static_cast<int>(out.size()) < count; ++tries) {
    if (tries > 1000 * count) throw ParameterError("window too small for adapted bumps");
    Vec c(n);
    for (int a = 0; a < n; ++a) c[a] = win.lo[a] + (win.hi[a] - win.lo[a]) * U(rng);
    Box sup = Bump::ellipsoid(c, NormalizedFrame::at(M, c).L, kappa * field.at(c)).support();
    if (win.contains(sup.lo) && win.contains(sup.hi)) out.push_back(c);
  }
  return out;
}

std::vector<NamedField> ball_suite(const AdmissibleBall& ball, int count, int degree, double width,
                                   std::uint64_t seed, const std::string& prefix) {
  const int n = static_cast<int>(ball.frame.center.size());
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  std::normal_distribution<double> N(0.0, 1.0);
  const double R = ball.radius;
  std::vector<NamedField> out;
  for (int i = 0; i < count; ++i) {
    double rho = width * R * (0.7 + 0.3 * U(rng));
    Vec dir(n);
    for (int a = 0; a < n; ++a) dir[a] = N(rng);
    Vec z = dir.normalized() * (0.999 * (R - rho) * std::pow(U(rng), 1.0 / n));
    Vec c = ball.frame.to_chart(z);
    Bump b = Bump::ellipsoid(c, ball.frame.L, rho);
    out.push_back({prefix + std::to_string(i), bump_form(rng, n, degree, b, true), c});
  }
  return out;
}

ExperimentReport check_euclidean_scaling(int n, double r, const std::vector<double>& radii, int suite_size,
                                         std::uint64_t seed, int nodes) {
  if (!(r >= 1.0 && r < n)) throw ParameterError("need 1 <= r < n");
  const double t = embedding_exponent(n, r);
  Manifold E = make_builtin("euclidean", n);
  ExperimentReport rep;
  rep.experiment = "euclidean_scaling";
  rep.manifold = manifold_json(E);
  rep.params = {{"n", n}, {"r", r}, {"t", t}, {"radii", radii}, {"suite_size", suite_size}, {"seed", seed}};
  for (double R : radii)
    if (!(R > 0.0 && R <= 1.0)) throw ParameterError("radii must lie in (0, 1]");

  AdmissibleBall unit = make_ball(E, Vec::Zero(n), 1.0, 0, 0.1);
  auto base = ball_suite(unit, suite_size, 0, 0.6, seed, "u");

  // c = ||u||_t / (R^-1 ||u||_r + ||grad u||_r) is invariant under u -> u(./R)
  auto row = [&](const std::string& id, const FormField& u, double R) {
    Quadrature q = ball_rule(BallRegion{Vec::Zero(n), Mat::Identity(n, n), R}, nodes);
    double lhs = lp_norm(E, u, q, t);
    auto w = sobolev_terms(E, u, q, 1, r);
    double scaled_rhs = w[0] / R + w[1];
    double unscaled_rhs = (w[0] + w[1]) / R;
    rep.add_row(id, lhs, scaled_rhs,
                {{"R", R}, {"unscaled_rhs", unscaled_rhs}, {"unscaled_ratio", unscaled_rhs > 0 ? lhs / unscaled_rhs : 0.0}});
    return scaled_rhs > 0.0 ? lhs / scaled_rhs : -1.0;
  };

  double rescaled_dev = 0.0;
  for (std::size_t j = 0; j < base.size(); ++j) {
    std::vector<double> cs;
    for (double R : radii) {
      FormField uR = pullback_affine(base[j].field, Vec::Zero(n), Mat(Mat::Identity(n, n) / R));
      double c = row("rescaled-" + std::to_string(j) + "-R" + std::to_string(R), uR, R);
      if (c >= 0.0) cs.push_back(c);
    }
    if (!cs.empty()) rescaled_dev = std::max(rescaled_dev, spread_of(cs) - 1.0);
  }

  std::vector<double> fitted;
  for (std::size_t k = 0; k < radii.size(); ++k) {
    const double R = radii[k];
    AdmissibleBall b = make_ball(E, Vec::Zero(n), R, 0, 0.1);
    auto suite = ball_suite(b, suite_size, 0, 0.6, seed + 1000 + k, "g");
    std::vector<double> cs;
    for (const auto& f : suite) {
      double c = row("generic-R" + std::to_string(R) + "-" + f.id, f.field, R);
      if (c >= 0.0) cs.push_back(c);
    }
    fitted.push_back(median(cs));
  }
  double med = median(fitted);
  double generic_dev = 0.0;
  for (double c : fitted) generic_dev = std::max(generic_dev, std::abs(c / med - 1.0));

  double max_ratio = 0.0;
  for (const auto& r_ : rep.rows) max_ratio = std::max(max_ratio, r_["ratio"].get<double>());
  bool ok_rescaled = rescaled_dev <= 1e-3;
  bool ok_generic = generic_dev <= 0.25;
  rep.passed = ok_rescaled && ok_generic;
  rep.summary = {{"max_ratio", max_ratio},
                 {"violations", static_cast<int>(!ok_rescaled) + static_cast<int>(!ok_generic)},
                 {"rescaled_max_deviation", rescaled_dev},
                 {"generic_fitted_C", fitted},
                 {"generic_max_deviation", generic_dev},
                 {"thresholds", {{"rescaled_deviation", 1e-3}, {"generic_deviation", 0.25}}}};
  return rep;
}

ExperimentReport check_ball_embedding(const Manifold& M, const std::vector<AdmissibleBall>& balls, double r,
                                      int degree, int suite_size, std::uint64_t seed, double spread, int nodes) {
  const int n = M.dim();
  const double s = embedding_exponent(n, r);
  ExperimentReport rep;
  rep.experiment = "ball_embedding";
  rep.manifold = manifold_json(M);
  rep.params = {{"r", r}, {"s", s}, {"degree", degree}, {"suite_size", suite_size}, {"seed", seed}};
  std::vector<double> per_ball;
  json ball_info = json::array();
  bool finite = true;
  for (std::size_t i = 0; i < balls.size(); ++i) {
    const AdmissibleBall& b = balls[i];
    require_admissible(M, b);
    Quadrature q = ball_rule(ball_region(b), nodes);
    auto suite = ball_suite(b, suite_size, degree, 0.5, seed + i, "b" + std::to_string(i) + "-");
    double cmax = 0.0;
    for (const auto& f : suite) {
      double lhs = lp_norm(M, f.field, q, s);
      auto w = sobolev_terms(M, f.field, q, 1, r);
      double W = w[0] + w[1];
      double C = W > 0.0 ? lhs / W : 0.0;
      finite = finite && std::isfinite(C);
      cmax = std::max(cmax, C);
      rep.add_row(f.id, lhs, W / (b.radius * b.radius), {{"ball", i}, {"R", b.radius}, {"C", C}});
    }
    per_ball.push_back(cmax);
    ball_info.push_back({{"center", vec_json(b.frame.center)}, {"R", b.radius}, {"class", b.cls}, {"C", cmax}});
  }
  double sp = spread_of(per_ball);
  rep.passed = finite && sp <= spread;
  double max_ratio = 0.0;
  for (const auto& row : rep.rows) max_ratio = std::max(max_ratio, row["ratio"].get<double>());
  rep.summary = {{"max_ratio", max_ratio},
                 {"violations", static_cast<int>(!rep.passed)},
                 {"balls", ball_info},
                 {"C_spread", sp},
                 {"thresholds", {{"C_spread", spread}}}};
  return rep;
}

ExperimentReport run_embedding_experiment(const Manifold& M, const SobolevParams& P, const RadiusField& field,
                                          int cls, const EmbeddingOptions& opt) {
  const int n = M.dim();
  if (P.n != n) throw ParameterError("parameter n does not match the manifold");
  if (cls != 0 && cls != 1) throw ParameterError("class must be 0 or 1");
  const int degree = cls == 0 ? 0 : 1;
  Weight w, wp, w_ablate;
  if (opt.weighted) {
    w = Weight{&field, P.gamma};
    wp = Weight{&field, P.nu};
  }
  w_ablate = Weight{};

  ExperimentReport rep;
  rep.experiment = "weighted_embedding";
  rep.manifold = manifold_json(M);
  rep.params = {{"n", P.n}, {"m", P.m}, {"k", P.k}, {"r", P.r}, {"s", P.s}, {"gamma", P.gamma}, {"nu", P.nu},
                {"class", cls}, {"epsilon", field.epsilon()}, {"degree", degree}, {"suite_size", opt.suite_size},
                {"seed", opt.seed}, {"nodes", opt.nodes}, {"weighted", opt.weighted},
                {"scales", {1.0, opt.scale_ratio}}};

  auto evaluate = [&](const FormField& u, const Weight& lw, const Weight& rw, double& lhs, double& rhs) {
    Quadrature q = support_rule(M, u, opt.nodes);
    lhs = sobolev_norm(M, u, q, P.k, P.s, lw);
    rhs = sobolev_norm(M, u, q, P.m, P.r, rw);
  };

  std::vector<double> suite_max;
  bool finite = true;
  const double scales[2] = {1.0, opt.scale_ratio};
  for (int si = 0; si < 2; ++si) {
    SuiteOptions so;
    so.count = opt.suite_size;
    so.degree = degree;
    so.scale = scales[si];
    so.width = opt.width;
    so.shape = opt.shape;
    so.seed = opt.seed;
    double mx = 0.0;
    for (const auto& f : bump_suite(n, M.window(), so)) {
      double lhs, rhs;
      evaluate(f.field, wp, w, lhs, rhs);
      json& row = rep.add_row("scale" + std::to_string(si) + "-" + f.id, lhs, rhs,
                              {{"suite", si}, {"center", vec_json(f.center)}});
      double ratio = row["ratio"].get<double>();
      finite = finite && std::isfinite(ratio) && rhs > 0.0;
      mx = std::max(mx, ratio);
    }
    suite_max.push_back(mx);
  }
  double stability = suite_max[0] > 0 && suite_max[1] > 0
                         ? std::max(suite_max[0] / suite_max[1], suite_max[1] / suite_max[0])
                         : std::numeric_limits<double>::infinity();
  bool stable = stability <= opt.stability_factor;

  bool monotone = true;
  std::vector<double> ablation;
  if (!opt.depths.empty()) {
    if (n < 2) throw ParameterError("depth family needs n >= 2");
    std::mt19937_64 rng(opt.seed);
    const Box& win = M.window();
    for (double t : opt.depths) {
      if (t - opt.depth_halfwidth < win.lo[0] || t + opt.depth_halfwidth > win.hi[0])
        throw ParameterError("depth bump leaves the window");
      Vec c = win.center(), h(n);
      c[0] = t;
      h[0] = opt.depth_halfwidth;
      h[1] = kInf;
      for (int a = 2; a < n; ++a) h[a] = 0.4 * (win.hi[a] - win.lo[a]);
      FormField u = bump_form(rng, n, degree, Bump::ellipsoid(c, h), false);
      double lhs, rhs, lhs0, rhs0;
      evaluate(u, wp, w, lhs, rhs);
      evaluate(u, w_ablate, w, lhs0, rhs0);
      double a = rhs0 > 0 ? lhs0 / rhs0 : 0.0;
      if (!ablation.empty() && !(a > ablation.back())) monotone = false;
      ablation.push_back(a);
      rep.add_row("depth-" + std::to_string(t), lhs, rhs,
                  {{"depth", t}, {"ablation_lhs", lhs0}, {"ablation_rhs", rhs0}, {"ablation_ratio", a}});
    }
  }

  double max_ratio = 0.0;
  for (const auto& row : rep.rows)
    if (row["ratio"].is_number()) max_ratio = std::max(max_ratio, row["ratio"].get<double>());
  rep.passed = finite && stable && monotone;
  rep.summary = {{"max_ratio", max_ratio},
                 {"violations", static_cast<int>(!finite) + static_cast<int>(!stable) + static_cast<int>(!monotone)},
                 {"suite_max_ratio", suite_max},
                 {"stability", stability},
                 {"ablation_ratios", ablation},
                 {"ablation_increasing", monotone},
                 {"thresholds", {{"stability_factor", opt.stability_factor}, {"ablation", "strictly increasing"}}}};
  return rep;
}

GaffneyGrid gaffney_grid_search(const std::vector<double>& lhs, const std::vector<double>& a,
                                const std::vector<double>& b, int max) {
  auto feasible = [&](int C, int c) {
    for (std::size_t i = 0; i < lhs.size(); ++i)
      if (lhs[i] > (C * a[i] + c * b[i]) * (1 + 1e-12)) return false;
    return true;
  };
  for (int total = 2; total <= 2 * max; ++total)
    for (int C = std::max(1, total - max); C <= std::min(max, total - 1); ++C)
      if (feasible(C, total - C)) return {C, total - C, true};
  return {};
}

namespace {

struct GaffneyTerms {
  double d = 0.0, dstar = 0.0;
};

GaffneyTerms gaffney_terms(const Manifold& M, const FormField& u, const Quadrature& q, double r) {
  GaffneyTerms g;
  if (u.degree() < M.dim()) g.d = lp_norm(M, exterior_derivative(u), q, r);
  if (u.degree() >= 1) g.dstar = lp_norm(M, codifferential(M, u), q, r);
  return g;
}

}  // namespace

ExperimentReport run_gaffney_local(const Manifold& M, const std::vector<AdmissibleBall>& balls, double r,
                                   int suite_per_ball, int degree, std::uint64_t seed, int nodes) {
  if (degree < 0 || degree > M.dim()) throw ParameterError("form degree out of range");
  ExperimentReport rep;
  rep.experiment = "gaffney_local";
  rep.manifold = manifold_json(M);
  rep.params = {{"r", r}, {"degree", degree}, {"suite_per_ball", suite_per_ball}, {"seed", seed},
                {"grid", {1, 64}}, {"inner_ball_scale", 0.5}};
  std::vector<double> L, A, B;
  for (std::size_t i = 0; i < balls.size(); ++i) {
    const AdmissibleBall& b = balls[i];
    if (b.cls != 1) throw ParameterError("local Gaffney needs a class-1 ball");
    require_admissible(M, b);
    Quadrature q = ball_rule(ball_region(b), nodes);
    Quadrature qh = ball_rule(ball_region(b, 0.5), nodes);
    for (const auto& f : ball_suite(b, suite_per_ball, degree, 0.5, seed + i, "b" + std::to_string(i) + "-")) {
      double lhs = sobolev_terms(M, f.field, qh, 1, r)[1];
      GaffneyTerms g = gaffney_terms(M, f.field, q, r);
      double low = lp_norm(M, f.field, q, r) / b.radius;
      L.push_back(lhs);
      A.push_back(g.d + g.dstar);
      B.push_back(low);
      rep.add_row(f.id, lhs, g.d + g.dstar + low, {{"ball", i}, {"d", g.d}, {"dstar", g.dstar}, {"low", low}});
    }
  }
  GaffneyGrid G = gaffney_grid_search(L, A, B);
  double worst = 0.0;
  if (G.found)
    for (std::size_t i = 0; i < L.size(); ++i) {
      double rhs = G.C * A[i] + G.c * B[i];
      if (rhs > 0) worst = std::max(worst, L[i] / rhs);
    }
  double max_ratio = 0.0;
  for (const auto& row : rep.rows) max_ratio = std::max(max_ratio, row["ratio"].get<double>());
  rep.passed = G.found;
  rep.summary = {{"max_ratio", max_ratio},
                 {"violations", G.found ? 0 : 1},
                 {"C", G.found ? json(G.C) : json(nullptr)},
                 {"c", G.found ? json(G.c) : json(nullptr)},
                 {"fitted_max_ratio", worst},
                 {"thresholds", {{"grid_max", 64}}}};
  return rep;
}

ExperimentReport run_gaffney_global(const Manifold& M, const RadiusField& field, const std::vector<NamedField>& suite,
                                    double r, double bound_factor, int nodes) {
  const int n = M.dim();
  double inv = 1.0 / r - 1.0 / n;
  ExperimentReport rep;
  rep.experiment = "gaffney_global";
  rep.manifold = manifold_json(M);
  rep.params = {{"r", r}, {"weight_exponent", -r}, {"suite_size", suite.size()}, {"nodes", nodes},
                {"epsilon", field.epsilon()}, {"class", field.cls()}};
  if (inv > 0.0) rep.params["s"] = 1.0 / inv;
  std::vector<double> weighted, unweighted, lohoue;
  for (const auto& f : suite) {
    Quadrature q = support_rule(M, f.field, nodes);
    auto w = sobolev_terms(M, f.field, q, 1, r);
    double lhs = w[0] + w[1];
    GaffneyTerms g = gaffney_terms(M, f.field, q, r);
    double low = lp_norm(M, f.field, q, r, Weight{&field, -r});
    double rhs = g.d + g.dstar + low;
    json extra = {{"d", g.d}, {"dstar", g.dstar}, {"low", low}, {"low_unweighted", w[0]},
                  {"center", vec_json(f.center)}};
    double rhs0 = g.d + g.dstar + w[0];
    extra["unweighted_ratio"] = rhs0 > 0 ? lhs / rhs0 : 0.0;
    if (rhs0 > 0) unweighted.push_back(lhs / rhs0);
    if (inv > 0.0) {
      double s = 1.0 / inv;
      double ls = lp_norm(M, f.field, q, s, Weight{&field, 2 * s});
      extra["lohoue_lhs"] = ls;
      extra["lohoue_ratio"] = rhs > 0 ? ls / rhs : 0.0;
      if (rhs > 0) lohoue.push_back(ls / rhs);
    }
    if (rhs > 0) weighted.push_back(lhs / rhs);
    rep.add_row(f.id, lhs, rhs, extra);
  }
  double sp = spread_of(weighted);
  rep.passed = !weighted.empty() && sp <= bound_factor;
  rep.summary = {{"max_ratio", weighted.empty() ? 0.0 : *std::max_element(weighted.begin(), weighted.end())},
                 {"violations", rep.passed ? 0 : 1},
                 {"constant_spread", sp},
                 {"unweighted_spread", spread_of(unweighted)},
                 {"lohoue_spread", spread_of(lohoue)},
                 {"thresholds", {{"constant_spread", bound_factor}}}};
  return rep;
}

ExperimentReport check_kato(const Manifold& M, const std::vector<NamedField>& suite, int m, int points_per_field,
                            std::uint64_t seed, double max_rate) {
  if (m != 0 && m != 1) throw ParameterError("Kato check supports m = 0 or 1");
  const int n = M.dim();
  const double h = kNablaStep;
  ExperimentReport rep;
  rep.experiment = "kato";
  rep.manifold = manifold_json(M);
  rep.params = {{"m", m}, {"points_per_field", points_per_field}, {"seed", seed}, {"step", h},
                {"skip_below", 1e-8}};
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  std::size_t total = 0, bad = 0;
  double worst = 0.0;
  for (const auto& f : suite) {
    Box region = intersect(M.window(), f.field.support());
    region.lo.array() += 3 * h;
    region.hi.array() -= 3 * h;
    if (region.empty()) continue;
    auto modulus = [&](const Vec& x) { return pointwise_norm(M.metric(x), nabla(M, f.field, x, m)); };
    std::size_t used = 0, viol = 0;
    for (int tries = 0; tries < 20 * points_per_field && used < static_cast<std::size_t>(points_per_field);
         ++tries) {
      Vec x(n);
      for (int a = 0; a < n; ++a) x[a] = region.lo[a] + (region.hi[a] - region.lo[a]) * U(rng);
      double v = modulus(x);
      if (v < 1e-8) continue;
      Vec df(n);
      for (int a = 0; a < n; ++a) {
        Vec e = Vec::Unit(n, a) * h;
        df[a] = (8 * (modulus(x + e) - modulus(x - e)) - (modulus(x + 2 * e) - modulus(x - 2 * e))) / (12 * h);
      }
      Mat g = M.metric(x);
      double lhs = std::sqrt(std::max(0.0, df.dot(g.ldlt().solve(df))));
      double rhs = pointwise_norm(g, nabla(M, f.field, x, m + 1));
      double tol = 1e-3 * rhs + 1e-9 * v;
      ++used;
      if (lhs > rhs + tol) ++viol;
      if (rhs > 0) worst = std::max(worst, (lhs - rhs) / rhs);
    }
    total += used;
    bad += viol;
    rep.add_row(f.id, static_cast<double>(viol), static_cast<double>(used));
  }
  double rate = total ? static_cast<double>(bad) / total : 0.0;
  rep.passed = rate < max_rate;
  rep.summary = {{"max_ratio", rate},
                 {"violations", bad},
                 {"points", total},
                 {"vacuous", total == 0},
                 {"violation_rate", rate},
                 {"worst_relative_excess", worst},
                 {"thresholds", {{"max_rate", max_rate}, {"tolerance", "1e-3 |nabla^(m+1) w| + 1e-9 |nabla^m w|"}}}};
  return rep;
}

ExperimentReport curvature_report(const Manifold& M, int samples, std::uint64_t seed) {
  const int n = M.dim();
  ExperimentReport rep;
  rep.experiment = "curvature";
  rep.manifold = manifold_json(M);
  rep.params = {{"samples", samples}, {"seed", seed}, {"step", kCurvatureStep}};
  const bool has = M.has_oracle("sectional_curvature");
  const double K0 = has ? M.oracle("sectional_curvature") : 0.0;
  const double tol = has && K0 == 0.0 ? 1e-6 : 1e-3;
  if (n < 2) {
    rep.summary = {{"max_ratio", 0.0}, {"violations", 0}, {"note", "n = 1 has no planes"},
                   {"thresholds", {{"sectional", tol}}}};
    return rep;
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(0.05, 0.95);
  std::normal_distribution<double> N(0.0, 1.0);
  const Box& win = M.window();
  int bad = 0;
  double max_err = 0.0, max_ric = 0.0;
  for (int i = 0; i < samples; ++i) {
    Vec x(n), v(n), w(n);
    for (int a = 0; a < n; ++a) {
      x[a] = win.lo[a] + (win.hi[a] - win.lo[a]) * U(rng);
      v[a] = N(rng);
      w[a] = N(rng);
    }
    double K = sectional_curvature(M, x, v, w);
    double Hmin = K, Kmax = K;
    for (int a = 0; a < n; ++a)
      for (int b = a + 1; b < n; ++b) {
        double Kab = sectional_curvature(M, x, Vec(Vec::Unit(n, a)), Vec(Vec::Unit(n, b)));
        Hmin = std::min(Hmin, Kab);
        Kmax = std::max(Kmax, Kab);
      }
    Vec ric = ricci_eigenvalues(M, x);
    json pt = vec_json(x);
    if (has) {
      double err = std::abs(K - K0);
      double rerr = (ric.array() - K0).abs().maxCoeff();
      max_err = std::max(max_err, err);
      max_ric = std::max(max_ric, rerr);
      bad += err > tol;
      bad += rerr > tol;
      rep.add_row("K-" + std::to_string(i), err, tol, {{"x", pt}, {"K", K}, {"oracle", K0}});
      rep.add_row("ric-" + std::to_string(i), rerr, tol, {{"x", pt}, {"ricci", vec_json(ric)}});
    } else {
      // Ricci bounded by the sectional range (mean over planes)
      double bound = std::max(std::abs(Hmin), std::abs(Kmax)) * (1 + 1e-3) + 1e-6;
      double lhs = ric.cwiseAbs().maxCoeff();
      bool inside = ric.minCoeff() >= Hmin - 1e-3 && ric.maxCoeff() <= Kmax + 1e-3;
      bad += !(lhs <= bound) || !inside;
      max_ric = std::max(max_ric, lhs / bound);
      rep.add_row("ric-" + std::to_string(i), lhs, bound,
                  {{"x", pt}, {"K", K}, {"H", Hmin}, {"Kmax", Kmax}, {"ricci", vec_json(ric)}});
    }
  }
  double max_ratio = 0.0;
  for (const auto& row : rep.rows) max_ratio = std::max(max_ratio, row["ratio"].get<double>());
  rep.passed = bad == 0;
  rep.summary = {{"max_ratio", max_ratio},
                 {"violations", bad},
                 {"max_sectional_error", max_err},
                 {"max_ricci_error", max_ric},
                 {"thresholds", {{"sectional", tol}, {"ricci", tol}}}};
  if (has) rep.summary["oracle"] = K0;
  return rep;
}

ExperimentReport cover_report(const Manifold& M, const RadiusField& field, const CoverOptions& opt) {
  Covering cv = vitali_cover(M, field, opt);
  auto probes = grid_points(cv.region, cv.probe_pitch);
  OverlapStats st = overlap_stats(M, cv, probes);
  bool disjoint = base_balls_disjoint(M, cv);
  ExperimentReport rep;
  rep.experiment = "cover";
  rep.manifold = manifold_json(M);
  rep.params = {{"class", cv.cls}, {"epsilon", cv.epsilon}, {"grid_pitch", opt.grid_pitch},
                {"probe_refine", opt.probe_refine}, {"region", {{"lo", vec_json(cv.region.lo)},
                                                                 {"hi", vec_json(cv.region.hi)}}}};
  rep.add_row("base", st.max_base, 1.0);
  rep.add_row("dilated", st.max_dilated, st.T);
  rep.add_row("full", st.max_full, st.T1);
  json centers = json::array(), radii = json::array();
  for (std::size_t i = 0; i < cv.size(); ++i) {
    centers.push_back(vec_json(cv.centers[i]));
    radii.push_back(cv.radius(i));
  }
  json hist = json::object();
  for (const auto& [k, v] : st.histogram) hist[std::to_string(k)] = v;
  rep.passed = disjoint && st.ok() && st.max_base <= 1;
  rep.summary = {{"max_ratio", std::max(st.max_dilated / st.T, st.max_full / st.T1)},
                 {"violations", static_cast<int>(!rep.passed)},
                 {"balls", cv.size()},
                 {"candidates", cv.candidates},
                 {"probes", st.probes},
                 {"uncovered", st.uncovered},
                 {"base_disjoint", disjoint},
                 {"max_base", st.max_base},
                 {"max_dilated", st.max_dilated},
                 {"max_full", st.max_full},
                 {"mean_dilated", st.mean_dilated},
                 {"mean_full", st.mean_full},
                 {"histogram", hist},
                 {"thresholds", {{"T", st.T}, {"T1", st.T1}, {"coverage", 1.0}}}};
  rep.extra = {{"centers", centers}, {"radii", radii}, {"max_overlap", st.max_full}, {"T", st.T}, {"T1", st.T1}};
  return rep;
}

std::string radius_csv(const RadiusField& f0, const RadiusField& f1) {
  if (f0.size() != f1.size()) throw ParameterError("radius fields have different grids");
  const int n = f0.manifold().dim();
  std::ostringstream os;
  os << std::setprecision(10);
  for (int a = 0; a < n; ++a) os << 'x' << a + 1 << ',';
  os << "R0,R1\n";
  for (std::size_t i = 0; i < f0.size(); ++i) {
    Vec x = f0.node(i);
    for (int a = 0; a < n; ++a) os << x[a] << ',';
    os << f0.radius_at_node(i) << ',' << f1.radius_at_node(i) << '\n';
  }
  return os.str();
}

}  // namespace wsob
