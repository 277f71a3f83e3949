#pragma once

#include "wsob/linalg.hpp"

#include <vector>

namespace wsob {

struct Quadrature {
  std::vector<Vec> nodes;
  std::vector<double> weights;

  std::size_t size() const { return nodes.size(); }
  double volume() const;
};

struct GaussRule {
  std::vector<double> x;
  std::vector<double> w;
};

/// Gauss-Legendre nodes and weights on [-1, 1].
const GaussRule& gauss_legendre(int m);

inline constexpr int kWindowNodes = 48;
inline constexpr int kBallNodes = 24;

/// Tensor Gauss-Legendre rule on a bounded box; empty box gives an empty rule.
Quadrature box_rule(const Box& b, int nodes = kWindowNodes);

/// The ellipsoid {c + L z : |z| < radius}.
struct BallRegion {
  Vec center;
  Mat L;
  double radius = 0.0;

  double coordinate_volume() const;
  bool contains(const Vec& y) const;
  Box bounding_box() const;
};

/// n = 1: interval; n = 2: polar; n = 3: spherical product; n = 4: masked
/// tensor rule renormalized to the exact volume.
Quadrature ball_rule(const BallRegion& ball, int nodes = kBallNodes);

}  // namespace wsob
