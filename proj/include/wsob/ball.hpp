#pragma once

#include "wsob/manifold.hpp"

#include <vector>

namespace wsob {

/// Normalized affine chart at a center: z = sqrt_g (y - c), y = c + L z with
/// L = g(c)^{-1/2}, so the pulled-back metric is the identity at z = 0.
struct NormalizedFrame {
  Vec center;
  Mat sqrt_g;
  Mat L;

  static NormalizedFrame at(const Manifold& M, const Vec& c);
  Vec to_chart(const Vec& z) const { return center + L * z; }
  Vec to_normal(const Vec& y) const { return sqrt_g * (y - center); }
  double normal_distance(const Vec& y) const { return to_normal(y).norm(); }
};

struct AdmissibleBall {
  Point center;
  double radius = 0.0;
  int cls = 0;
  double epsilon = 0.1;
  NormalizedFrame frame;
};

/// Test points in the closed unit ball: the center, the 2n axis points on
/// the sphere, and 2^k Halton points accepted from the enclosing cube.
class BallSampler {
 public:
  explicit BallSampler(int n, int k = 9);

  int dim() const { return n_; }
  int level() const { return k_; }
  const std::vector<Vec>& points() const { return pts_; }

 private:
  int n_;
  int k_;
  std::vector<Vec> pts_;
};

double halton(std::uint64_t index, int base);

}  // namespace wsob
