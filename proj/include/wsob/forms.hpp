#pragma once

#include "wsob/manifold.hpp"

#include <memory>
#include <vector>

namespace wsob {

// Multi-indices are bitmasks over {0..n-1}; tables list them in lexicographic
// order of the increasing index tuple.
int binom(int n, int k);
const std::vector<unsigned>& subsets(int n, int p);
int subset_index(int n, unsigned mask);
std::vector<int> subset_members(unsigned mask);
unsigned full_mask(int n);

/// Sign of the permutation that sorts the concatenation (I, J); I, J disjoint.
int concat_sign(unsigned I, unsigned J);

struct Monomial {
  double coef = 0.0;
  std::array<int, kMaxDim> pow{};
};

struct Polynomial {
  int n = 0;
  std::vector<Monomial> terms;

  static Polynomial constant(int n, double c);
  static Polynomial linear(int n, int axis, double c = 1.0);

  double value(const Vec& x) const;
  Vec grad(const Vec& x) const;
  Mat hess(const Vec& x) const;
};

/// exp(1 - 1/(1-q)) with q = (x-c)^T Q (x-c), zero for q >= 1. Q is positive
/// semidefinite; a zero row/column drops that axis, which gives slab bumps.
struct Bump {
  Vec center;
  Mat Q;

  static Bump ball(const Vec& c, double radius);
  static Bump ellipsoid(const Vec& c, const Vec& radii);
  static Bump ellipsoid(const Vec& c, const Mat& L, double radius);  // {c + L z : |z| < radius}

  double value(const Vec& x) const;
  void jet(const Vec& x, int order, double& v, Vec& g, Mat& h) const;
  Box support() const;
};

/// Sum of amp * poly * bump terms; the bump may be absent (global polynomial).
class ScalarField {
 public:
  struct Term {
    double amp = 1.0;
    Polynomial poly;
    bool has_bump = false;
    Bump bump;
  };

  explicit ScalarField(int n = 0) : n_(n) {}
  static ScalarField bump(const Bump& b, double amp = 1.0);
  static ScalarField poly(const Polynomial& p);
  static ScalarField modulated(const Bump& b, const Polynomial& p, double amp = 1.0);

  ScalarField& add(Term t);
  int dim() const { return n_; }
  const std::vector<Term>& terms() const { return terms_; }

  void jet(const Vec& x, int order, double& v, Vec& g, Mat& h) const;
  double value(const Vec& x) const;
  Box support() const;

 private:
  int n_;
  std::vector<Term> terms_;
};

/// Coefficients of a p-form and their first/second partials at a point.
struct FormJet {
  int n = 0;
  int p = 0;
  int order = 0;
  std::vector<double> v;
  std::vector<Vec> d1;
  std::vector<Mat> d2;

  static FormJet zero(int n, int p, int order);
};

class FormSource {
 public:
  virtual ~FormSource() = default;
  virtual int dim() const = 0;
  virtual int degree() const = 0;
  virtual int max_order() const = 0;
  virtual FormJet eval(const Vec& x, int order) const = 0;
};

inline constexpr double kJetStep = 1e-5;

class FormField {
 public:
  FormField() = default;
  FormField(std::shared_ptr<const FormSource> src, Box support);

  int dim() const { return src_->dim(); }
  int degree() const { return src_->degree(); }
  const Box& support() const { return support_; }
  int analytic_order() const { return src_->max_order(); }

  /// Jets beyond the analytic order fall back to central differences.
  FormJet jet(const Vec& x, int order) const;
  std::vector<double> value(const Vec& x) const { return jet(x, 0).v; }

 private:
  std::shared_ptr<const FormSource> src_;
  Box support_;
};

FormField make_form(int n, int p, std::vector<ScalarField> coeffs);
FormField scalar_form(const ScalarField& u);
FormField scaled(const FormField& w, double lambda);
FormField sum(const FormField& a, const FormField& b);

/// dw, degree p+1.
FormField exterior_derivative(const FormField& w);

enum class HodgeFlavor { metric, flat_chart };

/// Matrix of * on p-forms at metric g: (*w)_K = sum_J S(K,J) w_J.
Eigen::MatrixXd hodge_matrix(const Mat& g, int p, HodgeFlavor flavor);
std::vector<double> hodge_star(const Mat& g, int p, const std::vector<double>& a, HodgeFlavor flavor);
std::vector<double> hodge_star(const Manifold& M, const Vec& x, int p, const std::vector<double>& a,
                               HodgeFlavor flavor);

/// d* = (-1)^p *^{-1} d *, degree p-1.
FormField codifferential(const Manifold& M, const FormField& w, HodgeFlavor flavor = HodgeFlavor::metric);

/// Coefficients of the pullback of w under y = c + L z.
FormField pullback_affine(const FormField& w, const Vec& c, const Mat& L);

/// Pointwise scalar product of p-forms, (a, b)_g = a_I det(g^{-1}[I,J]) b_J.
double form_inner(const Mat& g, int p, const std::vector<double>& a, const std::vector<double>& b);
double form_norm(const Mat& g, int p, const std::vector<double>& a);

std::vector<double> wedge(int n, int p, const std::vector<double>& a, int q, const std::vector<double>& b);

}  // namespace wsob
