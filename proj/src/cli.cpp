#include "wsob/cli.hpp"

#include "wsob/experiments.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <fstream>
#include <ostream>

namespace wsob {

using nlohmann::json;

namespace {

struct Common {
  std::string manifold;
  double epsilon = 0.1;
  int cls = 0;
  std::string out;
  std::uint64_t seed = 0;
  int nodes = 0;
  bool timing = false;
};

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--manifold", c.manifold, "manifold spec (JSON)")->required()->check(CLI::ExistingFile);
  sub->add_option("--epsilon", c.epsilon, "admissibility epsilon in (0, 1/2)")->capture_default_str();
  sub->add_option("--class", c.cls, "admissible class")->check(CLI::IsMember({0, 1}))->capture_default_str();
  sub->add_option("--out", c.out, "report path (default: stdout)");
  sub->add_option("--seed", c.seed, "random seed")->capture_default_str();
  sub->add_option("--nodes", c.nodes, "quadrature nodes per axis (0: default)")->capture_default_str();
  sub->add_flag("--timing", c.timing, "record runtime_ms in the report");
}

void write_text(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty()) {
    out << text;
    return;
  }
  std::ofstream f(path);
  if (!f) throw ParameterError("cannot write '" + path + "'");
  f << text;
}

int default_window_nodes(int n) { return n <= 2 ? kWindowNodes : n == 3 ? 20 : 10; }

std::vector<AdmissibleBall> probe_balls(const Manifold& M, int cls, double eps) {
  const Box& w = M.window();
  std::vector<AdmissibleBall> balls;
  for (double f : {-0.3, 0.0, 0.3}) {
    Vec x = w.center();
    x[0] += f * w.halfwidths()[0];
    balls.push_back(make_ball(M, x, admissible_radius(M, x, cls, eps), cls, eps));
  }
  return balls;
}

std::vector<double> depth_family(const Manifold& M, double halfwidth) {
  if (M.spec().kind != "hyperbolic_cusp") return {};
  const Box& w = M.window();
  double lo = w.lo[0] + halfwidth + 0.2, hi = w.hi[0] - halfwidth - 0.2;
  std::vector<double> d;
  for (int i = 0; i < 5; ++i) d.push_back(lo + (hi - lo) * i / 4);
  return d;
}

}  // namespace

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Admissible radii, coverings and weighted Sobolev checks on charted manifolds", "wsob"};
  app.require_subcommand(1);
  Common c;

  auto* radius = app.add_subcommand("radius", "CSV of R0, R1 over a grid of the window");
  add_common(radius, c);
  int grid = 0;
  std::string csv;
  radius->add_option("--grid", grid, "grid points per axis (0: default)");
  radius->add_option("--csv", csv, "CSV path (default: stdout)");

  auto* cover = app.add_subcommand("cover", "Vitali covering and overlap statistics");
  add_common(cover, c);
  double pitch = 0.0;
  cover->add_option("--grid-pitch", pitch, "candidate pitch in metric units (0: min r / 2)");

  auto* embed = app.add_subcommand("embed", "weighted Sobolev embedding experiment");
  add_common(embed, c);
  double r = 2.0, gamma = 0.0;
  int m = 1, k = 0, suite = 20;
  embed->add_option("--r", r, "source exponent")->capture_default_str();
  embed->add_option("--m", m, "source order")->capture_default_str();
  embed->add_option("--k", k, "target order")->capture_default_str();
  embed->add_option("--gamma", gamma, "weight exponent")->capture_default_str();
  embed->add_option("--suite", suite, "fields per suite")->capture_default_str();

  auto* gaff = app.add_subcommand("gaffney", "local and global Gaffney inequalities");
  add_common(gaff, c);
  int degree = 1;
  gaff->add_option("--r", r, "exponent")->capture_default_str();
  gaff->add_option("--degree", degree, "form degree")->capture_default_str();
  gaff->add_option("--suite", suite, "fields per ball / global suite size")->capture_default_str();

  auto* curv = app.add_subcommand("curvature", "sectional and Ricci curvature diagnostics");
  add_common(curv, c);
  int samples = 20;
  curv->add_option("--samples", samples, "sample points")->capture_default_str();

  auto* kato = app.add_subcommand("kato", "pointwise Kato inequality");
  add_common(kato, c);
  int km = -1, points = 100;
  kato->add_option("--m", km, "order 0 or 1 (default both)");
  kato->add_option("--degree", degree, "form degree")->capture_default_str();
  kato->add_option("--suite", suite, "fields")->capture_default_str();
  kato->add_option("--points", points, "points per field")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  auto t0 = std::chrono::steady_clock::now();
  auto finish = [&](ExperimentReport& rep) {
    if (c.timing)
      rep.runtime_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    write_text(c.out, rep.dump() + "\n", out);
    return rep.passed ? 0 : 1;
  };

  std::string name = app.get_subcommands().front()->get_name();
  try {
    Manifold M = load_manifold(c.manifold);
    const int n = M.dim();
    const int wn = c.nodes > 0 ? c.nodes : default_window_nodes(n);
    const int bn = c.nodes > 0 ? c.nodes : kBallNodes;

    if (name == "radius") {
      RadiusField f0 = RadiusField::over_window(M, 0, c.epsilon, grid);
      RadiusField f1 = RadiusField::over_window(M, 1, c.epsilon, grid);
      write_text(csv, radius_csv(f0, f1), out);
      ExperimentReport rep;
      rep.experiment = "radius";
      rep.manifold = manifold_json(M);
      rep.params = {{"epsilon", c.epsilon}, {"grid", f0.dims()}};
      std::size_t bad = 0;
      for (std::size_t i = 0; i < f0.size(); ++i) {
        double a = f0.radius_at_node(i), b = f1.radius_at_node(i);
        bad += !(a > 0 && a <= 1 && b > 0 && b <= a * (1 + 1e-9));
      }
      rep.passed = bad == 0;
      rep.summary = {{"max_ratio", f1.max_radius() / f0.max_radius()},
                     {"violations", bad},
                     {"R0_min", f0.min_radius()},
                     {"R0_max", f0.max_radius()},
                     {"R1_min", f1.min_radius()},
                     {"R1_max", f1.max_radius()},
                     {"thresholds", {{"range", "0 < R1 <= R0 <= 1"}}}};
      if (c.out.empty()) return rep.passed ? 0 : 1;
      return finish(rep);
    }

    RadiusField field = RadiusField::over_window(M, c.cls, c.epsilon);

    if (name == "cover") {
      CoverOptions opt;
      opt.grid_pitch = pitch;
      ExperimentReport rep = cover_report(M, field, opt);
      return finish(rep);
    }
    if (name == "embed") {
      EmbeddingOptions opt;
      opt.suite_size = suite;
      opt.seed = c.seed;
      opt.nodes = wn;
      opt.depths = depth_family(M, opt.depth_halfwidth);
      ExperimentReport rep =
          run_embedding_experiment(M, SobolevParams::make(n, m, k, r, gamma), field, c.cls, opt);
      return finish(rep);
    }
    if (name == "gaffney") {
      RadiusField f1 = c.cls == 1 ? field : RadiusField::over_window(M, 1, c.epsilon);
      ExperimentReport local = run_gaffney_local(M, probe_balls(M, 1, c.epsilon), r, suite, degree, c.seed, bn);
      auto centers = adapted_centers(M, f1, suite, 0.5, c.seed);
      ExperimentReport global = run_gaffney_global(M, f1, adapted_suite(M, f1, centers, degree, 0.5, c.seed), r,
                                                   10.0, wn);
      ExperimentReport rep;
      rep.experiment = "gaffney";
      rep.manifold = manifold_json(M);
      rep.params = {{"r", r}, {"degree", degree}, {"epsilon", c.epsilon}, {"seed", c.seed}};
      rep.rows = local.rows;
      for (auto& row : global.rows) rep.rows.push_back(row);
      rep.passed = local.passed && global.passed;
      rep.summary = {{"max_ratio", std::max(local.summary["max_ratio"].get<double>(),
                                            global.summary["max_ratio"].get<double>())},
                     {"violations", local.summary["violations"].get<int>() + global.summary["violations"].get<int>()},
                     {"local", local.summary},
                     {"global", global.summary},
                     {"thresholds", {{"grid_max", 64}, {"constant_spread", 10.0}}}};
      return finish(rep);
    }
    if (name == "curvature") {
      ExperimentReport rep = curvature_report(M, samples, c.seed);
      return finish(rep);
    }
    if (name == "kato") {
      SuiteOptions so;
      so.count = suite;
      so.degree = degree;
      so.seed = c.seed;
      auto fields = bump_suite(n, M.window(), so);
      ExperimentReport rep;
      rep.experiment = "kato";
      rep.manifold = manifold_json(M);
      rep.params = {{"degree", degree}, {"suite", suite}, {"points_per_field", points}, {"seed", c.seed}};
      rep.passed = true;
      json per_m = json::object();
      double worst = 0.0;
      int viol = 0;
      for (int mm : {0, 1}) {
        if (km >= 0 && mm != km) continue;
        ExperimentReport sub = check_kato(M, fields, mm, points, c.seed);
        for (auto row : sub.rows) {
          row["m"] = mm;
          rep.rows.push_back(row);
        }
        per_m[std::to_string(mm)] = sub.summary;
        worst = std::max(worst, sub.summary["violation_rate"].get<double>());
        viol += sub.summary["violations"].get<int>();
        rep.passed = rep.passed && sub.passed;
      }
      rep.summary = {{"max_ratio", worst}, {"violations", viol}, {"by_m", per_m},
                     {"thresholds", {{"max_rate", 1e-3}}}};
      return finish(rep);
    }
  } catch (const ParameterError& e) {
    err << "wsob " << name << ": " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    ExperimentReport rep;
    rep.experiment = name;
    rep.passed = false;
    rep.summary = {{"error", e.what()}, {"violations", 1}};
    err << "wsob " << name << ": " << e.what() << "\n";
    try {
      write_text(c.out, rep.dump() + "\n", out);
    } catch (const std::exception&) {
    }
    return 1;
  }
  return 2;
}

}  // namespace wsob
