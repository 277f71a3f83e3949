#pragma once

#include "wsob/linalg.hpp"

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace wsob {

/// Coordinate domain of a chart: a box (bounds may be infinite) or an open
/// ball. Axes with a nonzero period wrap around and are unbounded for
/// containment purposes.
struct ChartDomain {
  enum class Kind { box, ball };

  Kind kind = Kind::box;
  Box box;
  Vec ball_center;
  double ball_radius = 0.0;
  Vec period;

  static ChartDomain make_box(const Box& b);
  static ChartDomain make_ball(const Vec& center, double radius);

  int dim() const;
  bool contains(const Vec& x) const;
  bool contains(const Box& b) const;
  bool periodic(int axis) const { return period.size() > axis && period[axis] > 0.0; }

  /// Largest R such that {c + L z : |z| < R} stays inside the domain, with
  /// periodic axes limited to half a period of extent on each side.
  double max_normalized_radius(const Vec& c, const Mat& L) const;

  /// Coordinate distance from x to the domain boundary (inf if unbounded).
  double boundary_distance(const Vec& x) const;
};

using MetricFn = std::function<Mat(const Vec&)>;
using PartialsFn = std::function<Rank3(const Vec&)>;

struct Chart {
  std::string id;
  ChartDomain domain;
  MetricFn metric;
  PartialsFn partials;  // may be empty; central differences are used then
};

struct Point {
  std::string chart;
  Vec coords;
};

struct ManifoldSpec {
  std::string kind;
  int n = 0;
  std::map<std::string, double> params;
  Vec window_center;
  Vec window_halfwidths;
  // Optional smaller region for coverings; defaults to the window.
  std::optional<Box> cover_window;

  std::string to_json() const;
  static ManifoldSpec from_json(const std::string& text);
  static ManifoldSpec load(const std::string& path);
};

using Oracle = std::function<double(double)>;

class Manifold {
 public:
  Manifold(int n, std::vector<Chart> charts, std::string window_chart, Box window);

  int dim() const { return n_; }
  const std::vector<Chart>& charts() const { return charts_; }
  const Chart& chart(const std::string& id) const;
  const Chart& window_chart() const { return charts_[window_idx_]; }
  const Box& window() const { return window_; }
  const Box& cover_window() const { return cover_window_; }
  void set_cover_window(const Box& b);

  const ManifoldSpec& spec() const { return spec_; }
  void set_spec(ManifoldSpec s) { spec_ = std::move(s); }

  void add_oracle(const std::string& name, Oracle f) { oracles_[name] = std::move(f); }
  bool has_oracle(const std::string& name) const { return oracles_.count(name) != 0; }
  double oracle(const std::string& name, double arg = 0.0) const;

  // Window-chart shortcuts; these are what the experiments use.
  Mat metric(const Vec& x) const;
  Rank3 partials(const Vec& x) const;
  double volume_element(const Vec& x) const;
  Point point(const Vec& x) const { return Point{window_chart().id, x}; }

 private:
  int n_;
  std::vector<Chart> charts_;
  std::size_t window_idx_ = 0;
  Box window_;
  Box cover_window_;
  ManifoldSpec spec_;
  std::map<std::string, Oracle> oracles_;
};

inline constexpr double kFdStep = 1e-5;

Manifold make_builtin(const std::string& kind, int n, const std::map<std::string, double>& params = {},
                      std::optional<Box> window = std::nullopt);
Manifold make_manifold(const ManifoldSpec& spec);
Manifold load_manifold(const std::string& path);

Mat metric_at(const Manifold& M, const Point& p);
Rank3 metric_partials_at(const Manifold& M, const Point& p);
double volume_element(const Manifold& M, const Point& p);

/// Central differences of the chart metric, step h.
Rank3 fd_partials(const Chart& chart, const Vec& x, double h = kFdStep);

/// Volume of the unit ball in R^n.
double unit_ball_volume(int n);

}  // namespace wsob
