#pragma once

#include "wsob/ball.hpp"

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace wsob {

struct Admissibility {
  bool ok = true;
  std::string reason;      // empty, "leaves chart", "(*)" or "(**)"
  double eig_min = 1.0;    // extreme eigenvalues of the normalized metric
  double eig_max = 1.0;
  double dg_term = 0.0;    // R * sum_beta sup |d_beta g~|
  double margin0 = 0.0;    // distance of the eigenvalues to the band edge
  double margin1 = 0.0;    // epsilon - dg_term (class 1)
};

Admissibility is_admissible(const Manifold& M, const Vec& x, double R, int cls, double eps,
                            const BallSampler& sampler);
Admissibility is_admissible(const Manifold& M, const Vec& x, double R, int cls, double eps,
                            const BallSampler& sampler, const NormalizedFrame& frame);

struct RadiusSearch {
  double r_prime = 0.0;  // R'(x), largest admissible radius found
  double radius = 0.0;   // R_eps(x) = min(1, R'/2)
  double r_max = 0.0;
  std::vector<std::pair<double, bool>> trace;
};

inline constexpr double kRadiusCap = 4.0;
inline constexpr double kBisectionTol = 1e-3;
inline constexpr int kBisectionMaxIter = 30;

RadiusSearch search_radius(const Manifold& M, const Vec& x, int cls, double eps, const BallSampler& sampler);
double admissible_radius(const Manifold& M, const Vec& x, int cls, double eps, int sampler_level = 9);
double admissible_radius(const Manifold& M, const Point& p, int cls, double eps, int sampler_level = 9);

AdmissibleBall make_ball(const Manifold& M, const Vec& x, double R, int cls, double eps);

/// Admissible radii on a regular grid over a box, memoized at construction.
class RadiusField {
 public:
  RadiusField(const Manifold& M, const Box& box, std::vector<int> dims, int cls, double eps, int sampler_level = 9);
  /// Grid over the manifold window with a dimension-dependent default size.
  static RadiusField over_window(const Manifold& M, int cls, double eps, int per_axis = 0, int sampler_level = 9);

  int cls() const { return cls_; }
  double epsilon() const { return eps_; }
  const Box& box() const { return box_; }
  const std::vector<int>& dims() const { return dims_; }
  const Manifold& manifold() const { return M_; }
  int sampler_level() const { return level_; }

  std::size_t size() const { return R_.size(); }
  Vec node(std::size_t i) const;
  double radius_at_node(std::size_t i) const { return R_[i]; }
  double prime_at_node(std::size_t i) const { return Rp_[i]; }

  /// Multilinear interpolation of log R_eps, clamped to the grid box.
  double at(const Vec& x) const;
  double prime_at(const Vec& x) const;
  /// Fresh bisection at x.
  RadiusSearch exact(const Vec& x) const;

  double min_radius() const;
  double max_radius() const;

 private:
  double interp(const std::vector<double>& v, const Vec& x) const;

  Manifold M_;
  Box box_;
  std::vector<int> dims_;
  int cls_;
  double eps_;
  int level_;
  BallSampler sampler_;
  std::vector<double> R_, Rp_, logR_, logRp_;
};

struct SlowVariationRow {
  Vec x, y;
  double rx = 0, ry = 0, rpx = 0, rpy = 0, dist = 0;
  bool band_ok = true;
  bool lipschitz_ok = true;
};

struct SlowVariationReport {
  std::size_t pairs = 0;
  std::size_t band_violations = 0;
  std::size_t lipschitz_violations = 0;
  double slack = 0.05;
  double worst_band = 0.0;        // max of max(R(y)/R(x), R(x)/R(y)) / 2
  double worst_lipschitz = 0.0;   // max |dR'| / ((1+eps) d)
  std::vector<SlowVariationRow> rows;
  bool ok() const { return band_violations == 0 && lipschitz_violations == 0; }
};

/// Random pairs x in the field box, y = x + L z with |z| < R(x)/(1+eps).
std::vector<std::pair<Vec, Vec>> sample_pairs(const RadiusField& field, std::size_t count, std::uint64_t seed,
                                              const Box* region = nullptr);

SlowVariationReport verify_slow_variation(const RadiusField& field, const std::vector<std::pair<Vec, Vec>>& pairs,
                                          double slack = 0.05);

}  // namespace wsob
