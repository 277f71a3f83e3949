#pragma once

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace wsob {

/// Desk-scale bound on the manifold dimension. Small fixed-capacity Eigen
/// types keep metric evaluation free of heap traffic.
inline constexpr int kMaxDim = 4;

using Vec = Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::ColMajor, kMaxDim, 1>;
using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor, kMaxDim, kMaxDim>;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Point is outside a chart, region or stencil.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Bad user-facing parameters (unknown kinds, violated preconditions).
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Numerical model failure (non-SPD metric, degenerate point).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Dense n x n x n array stored row-major. Used both for metric partials
/// (k, i, j) = d_k g_ij and Christoffel symbols (k, i, j) = Gamma^k_ij.
class Rank3 {
 public:
  Rank3() = default;
  explicit Rank3(int n) : n_(n) { v_.fill(0.0); }

  int dim() const { return n_; }
  double& operator()(int a, int b, int c) { return v_[(a * n_ + b) * n_ + c]; }
  double operator()(int a, int b, int c) const { return v_[(a * n_ + b) * n_ + c]; }

  double max_abs() const {
    double m = 0.0;
    for (int i = 0; i < n_ * n_ * n_; ++i) m = std::max(m, std::abs(v_[i]));
    return m;
  }

  // Slice d_k g as a matrix.
  Mat slice(int a) const {
    Mat m(n_, n_);
    for (int b = 0; b < n_; ++b)
      for (int c = 0; c < n_; ++c) m(b, c) = (*this)(a, b, c);
    return m;
  }

 private:
  int n_ = 0;
  std::array<double, kMaxDim * kMaxDim * kMaxDim> v_{};
};

/// Axis-aligned box; infinite bounds are allowed.
struct Box {
  Vec lo;
  Vec hi;

  int dim() const { return static_cast<int>(lo.size()); }
  bool contains(const Vec& x) const {
    for (int i = 0; i < dim(); ++i)
      if (x[i] < lo[i] || x[i] > hi[i]) return false;
    return true;
  }
  bool bounded() const { return lo.allFinite() && hi.allFinite(); }
  bool empty() const {
    for (int i = 0; i < dim(); ++i)
      if (!(lo[i] < hi[i])) return true;
    return false;
  }
  Vec center() const { return 0.5 * (lo + hi); }
  Vec halfwidths() const { return 0.5 * (hi - lo); }

  static Box from_center(const Vec& c, const Vec& half) { return Box{c - half, c + half}; }
  static Box unbounded(int n) { return Box{Vec::Constant(n, -kInf), Vec::Constant(n, kInf)}; }
};

inline Box intersect(const Box& a, const Box& b) {
  return Box{a.lo.cwiseMax(b.lo), a.hi.cwiseMin(b.hi)};
}

struct EigenRange {
  double min;
  double max;
};

/// Extreme eigenvalues of a symmetric matrix.
EigenRange eigen_range(const Mat& m);

/// Symmetric square root and inverse square root of an SPD matrix.
Mat sym_sqrt(const Mat& m);
Mat sym_inv_sqrt(const Mat& m);

}  // namespace wsob
