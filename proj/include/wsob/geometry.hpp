#pragma once

#include "wsob/ball.hpp"
#include "wsob/forms.hpp"

#include <string>
#include <vector>

namespace wsob {

/// Gamma^k_ij stored at (k, i, j).
Rank3 christoffel(const Mat& g, const Rank3& dg);
Rank3 christoffel(const Manifold& M, const Vec& x);
Rank3 christoffel(const Manifold& M, const Point& p);

/// R^l_{kij} stored at (l, k, i, j), R(d_i, d_j) d_k = R^l_{kij} d_l.
class Rank4 {
 public:
  explicit Rank4(int n) : n_(n), v_(static_cast<std::size_t>(n * n * n * n), 0.0) {}
  int dim() const { return n_; }
  double& operator()(int a, int b, int c, int d) { return v_[((a * n_ + b) * n_ + c) * n_ + d]; }
  double operator()(int a, int b, int c, int d) const { return v_[((a * n_ + b) * n_ + c) * n_ + d]; }

 private:
  int n_;
  std::vector<double> v_;
};

inline constexpr double kCurvatureStep = 1e-4;

Rank4 riemann(const Manifold& M, const Vec& x, double h = kCurvatureStep);

/// <R(v,w)w, v> / (|v|^2|w|^2 - <v,w>^2).
double sectional_curvature(const Manifold& M, const Vec& x, const Vec& v, const Vec& w);

/// Ricci tensor normalized by 1/(n-1), so Rc(v) is the mean sectional
/// curvature over planes containing the unit vector v.
Mat ricci(const Manifold& M, const Vec& x);
/// Eigenvalues of the normalized Ricci form relative to g.
Vec ricci_eigenvalues(const Manifold& M, const Vec& x);

/// Covariant tensor at a point: p antisymmetric form slots followed by
/// `extra` slots added by covariant differentiation. Row-major components.
struct TensorValue {
  int n = 0;
  int p = 0;
  int extra = 0;
  std::vector<double> comps;
  Vec base;

  int rank() const { return p + extra; }
  static TensorValue zero(int n, int p, int extra, const Vec& base);
};

/// Full antisymmetric components of a p-form.
TensorValue form_tensor(int n, int p, const std::vector<double>& coeffs, const Vec& base);

/// |T|_g, with form slots normalized so that |dx^1 ^ ... ^ dx^p|_delta = 1.
double pointwise_norm(const Mat& g, const TensorValue& T);
double pointwise_norm(const Manifold& M, const TensorValue& T);

TensorValue covariant_derivative(const Manifold& M, const FormField& w, const Vec& x);

inline constexpr double kNablaStep = 1e-4;

/// nabla^order w at x for order 0, 1, 2; the second layer differentiates the
/// first numerically with step 1e-4.
TensorValue nabla(const Manifold& M, const FormField& w, const Vec& x, int order);

/// Pointwise scalar product of two tensors of equal shape.
double tensor_inner(const Mat& g, const TensorValue& a, const TensorValue& b);

struct CmtReport {
  bool vacuous = false;
  double max_gamma = 0.0;
  double dg_sum = 0.0;
  double ratio = 0.0;
  double bound = 0.0;
  bool violated = false;
  std::string note;
};

/// max |Gamma| against sum_beta sup |d_beta g| in the normalized chart.
CmtReport cmt_check(const Manifold& M, const AdmissibleBall& ball, const BallSampler& samples);

}  // namespace wsob
