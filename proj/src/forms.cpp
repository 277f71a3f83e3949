#include "wsob/forms.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

namespace wsob {

int binom(int n, int k) {
  if (k < 0 || k > n) return 0;
  int r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

unsigned full_mask(int n) { return (1u << n) - 1u; }

std::vector<int> subset_members(unsigned mask) {
  std::vector<int> out;
  for (int i = 0; mask; ++i, mask >>= 1)
    if (mask & 1u) out.push_back(i);
  return out;
}

namespace {

struct SubsetTables {
  std::vector<unsigned> list[kMaxDim + 1][kMaxDim + 1];
  int index[kMaxDim + 1][1u << kMaxDim];

  SubsetTables() {
    for (int n = 0; n <= kMaxDim; ++n) {
      for (unsigned m = 0; m < (1u << n); ++m) list[n][std::popcount(m)].push_back(m);
      for (int p = 0; p <= n; ++p) {
        auto& v = list[n][p];
        std::sort(v.begin(), v.end(), [](unsigned a, unsigned b) { return subset_members(a) < subset_members(b); });
        for (std::size_t i = 0; i < v.size(); ++i) index[n][v[i]] = static_cast<int>(i);
      }
    }
  }
};

const SubsetTables& tables() {
  static const SubsetTables t;
  return t;
}

}  // namespace

const std::vector<unsigned>& subsets(int n, int p) { return tables().list[n][p]; }
int subset_index(int n, unsigned mask) { return tables().index[n][mask]; }

int concat_sign(unsigned I, unsigned J) {
  int inv = 0;
  for (int i : subset_members(I))
    for (int j : subset_members(J))
      if (i > j) ++inv;
  return (inv % 2) ? -1 : 1;
}

// Polynomial

Polynomial Polynomial::constant(int n, double c) {
  Polynomial p;
  p.n = n;
  p.terms.push_back(Monomial{c, {}});
  return p;
}

Polynomial Polynomial::linear(int n, int axis, double c) {
  Polynomial p;
  p.n = n;
  Monomial m{c, {}};
  m.pow[axis] = 1;
  p.terms.push_back(m);
  return p;
}

double Polynomial::value(const Vec& x) const {
  double s = 0.0;
  for (const auto& m : terms) {
    double t = m.coef;
    for (int i = 0; i < n; ++i) t *= std::pow(x[i], m.pow[i]);
    s += t;
  }
  return s;
}

namespace {

double ipow(double x, int k) { return k < 0 ? 0.0 : std::pow(x, k); }

}  // namespace

Vec Polynomial::grad(const Vec& x) const {
  Vec g = Vec::Zero(n);
  for (const auto& m : terms) {
    for (int a = 0; a < n; ++a) {
      if (m.pow[a] == 0) continue;
      double t = m.coef * m.pow[a];
      for (int i = 0; i < n; ++i) t *= ipow(x[i], m.pow[i] - (i == a));
      g[a] += t;
    }
  }
  return g;
}

Mat Polynomial::hess(const Vec& x) const {
  Mat h = Mat::Zero(n, n);
  for (const auto& m : terms) {
    for (int a = 0; a < n; ++a) {
      for (int b = 0; b < n; ++b) {
        int pa = m.pow[a], pb = m.pow[b] - (a == b);
        if (pa == 0 || pb <= 0) continue;
        double t = m.coef * pa * pb;
        for (int i = 0; i < n; ++i) t *= ipow(x[i], m.pow[i] - (i == a) - (i == b));
        h(a, b) += t;
      }
    }
  }
  return h;
}

// Bump

Bump Bump::ball(const Vec& c, double radius) {
  const int n = static_cast<int>(c.size());
  return Bump{c, Mat(Mat::Identity(n, n) / (radius * radius))};
}

Bump Bump::ellipsoid(const Vec& c, const Vec& radii) {
  const int n = static_cast<int>(c.size());
  Mat Q = Mat::Zero(n, n);
  for (int i = 0; i < n; ++i) Q(i, i) = std::isfinite(radii[i]) ? 1.0 / (radii[i] * radii[i]) : 0.0;
  return Bump{c, Q};
}

Bump Bump::ellipsoid(const Vec& c, const Mat& L, double radius) {
  Mat Li = L.inverse();
  return Bump{c, Mat(Li.transpose() * Li / (radius * radius))};
}

double Bump::value(const Vec& x) const {
  Vec d = x - center;
  double q = d.dot(Q * d);
  if (q >= 1.0) return 0.0;
  return std::exp(1.0 - 1.0 / (1.0 - q));
}

void Bump::jet(const Vec& x, int order, double& v, Vec& g, Mat& h) const {
  const int n = static_cast<int>(x.size());
  Vec d = x - center;
  Vec Qd = Q * d;
  double q = d.dot(Qd);
  g = Vec::Zero(n);
  h = Mat::Zero(n, n);
  if (q >= 1.0) {
    v = 0.0;
    return;
  }
  double s = 1.0 - q;
  v = std::exp(1.0 - 1.0 / s);
  if (order < 1) return;
  double fq = -v / (s * s);
  Vec qg = 2.0 * Qd;
  g = fq * qg;
  if (order < 2) return;
  double fqq = v / (s * s * s * s) - 2.0 * v / (s * s * s);
  h = fqq * qg * qg.transpose() + fq * 2.0 * Q;
}

Box Bump::support() const {
  const int n = static_cast<int>(center.size());
  std::vector<int> live;
  for (int i = 0; i < n; ++i)
    if (Q.row(i).cwiseAbs().maxCoeff() > 0.0) live.push_back(i);
  Box b = Box::unbounded(n);
  if (live.empty()) return b;
  Mat sub(static_cast<int>(live.size()), static_cast<int>(live.size()));
  for (std::size_t a = 0; a < live.size(); ++a)
    for (std::size_t c = 0; c < live.size(); ++c) sub(a, c) = Q(live[a], live[c]);
  Mat inv = sub.inverse();
  for (std::size_t a = 0; a < live.size(); ++a) {
    double e = std::sqrt(std::max(inv(a, a), 0.0));
    b.lo[live[a]] = center[live[a]] - e;
    b.hi[live[a]] = center[live[a]] + e;
  }
  return b;
}

// ScalarField

ScalarField ScalarField::bump(const Bump& b, double amp) {
  const int n = static_cast<int>(b.center.size());
  return modulated(b, Polynomial::constant(n, 1.0), amp);
}

ScalarField ScalarField::poly(const Polynomial& p) {
  ScalarField f(p.n);
  f.add(Term{1.0, p, false, {}});
  return f;
}

ScalarField ScalarField::modulated(const Bump& b, const Polynomial& p, double amp) {
  ScalarField f(static_cast<int>(b.center.size()));
  f.add(Term{amp, p, true, b});
  return f;
}

ScalarField& ScalarField::add(Term t) {
  terms_.push_back(std::move(t));
  return *this;
}

void ScalarField::jet(const Vec& x, int order, double& v, Vec& g, Mat& h) const {
  v = 0.0;
  g = Vec::Zero(n_);
  h = Mat::Zero(n_, n_);
  for (const auto& t : terms_) {
    double bv = 1.0;
    Vec bg = Vec::Zero(n_);
    Mat bh = Mat::Zero(n_, n_);
    if (t.has_bump) {
      t.bump.jet(x, order, bv, bg, bh);
      if (bv == 0.0) continue;
    }
    double pv = t.poly.value(x);
    v += t.amp * pv * bv;
    if (order < 1) continue;
    Vec pg = t.poly.grad(x);
    g += t.amp * (pv * bg + bv * pg);
    if (order < 2) continue;
    Mat ph = t.poly.hess(x);
    h += t.amp * (pv * bh + pg * bg.transpose() + bg * pg.transpose() + bv * ph);
  }
}

double ScalarField::value(const Vec& x) const {
  double v;
  Vec g;
  Mat h;
  jet(x, 0, v, g, h);
  return v;
}

Box ScalarField::support() const {
  Box b{Vec::Constant(n_, kInf), Vec::Constant(n_, -kInf)};
  for (const auto& t : terms_) {
    Box s = t.has_bump ? t.bump.support() : Box::unbounded(n_);
    b.lo = b.lo.cwiseMin(s.lo);
    b.hi = b.hi.cwiseMax(s.hi);
  }
  return b;
}

// FormJet / FormField

FormJet FormJet::zero(int n, int p, int order) {
  FormJet j;
  j.n = n;
  j.p = p;
  j.order = order;
  const int N = binom(n, p);
  j.v.assign(N, 0.0);
  if (order >= 1) j.d1.assign(N, Vec::Zero(n));
  if (order >= 2) j.d2.assign(N, Mat::Zero(n, n));
  return j;
}

FormField::FormField(std::shared_ptr<const FormSource> src, Box support)
    : src_(std::move(src)), support_(std::move(support)) {}

FormJet FormField::jet(const Vec& x, int order) const {
  const int n = dim(), p = degree();
  if (!support_.contains(x)) return FormJet::zero(n, p, order);
  if (order <= src_->max_order()) return src_->eval(x, order);
  FormJet base = jet(x, order - 1);
  FormJet out = base;
  out.order = order;
  const int N = binom(n, p);
  const double h = kJetStep;
  if (order == 1) out.d1.assign(N, Vec::Zero(n));
  else out.d2.assign(N, Mat::Zero(n, n));
  for (int i = 0; i < n; ++i) {
    Vec xp = x, xm = x;
    xp[i] += h;
    xm[i] -= h;
    FormJet jp = jet(xp, order - 1), jm = jet(xm, order - 1);
    for (int c = 0; c < N; ++c) {
      if (order == 1) out.d1[c][i] = (jp.v[c] - jm.v[c]) / (2 * h);
      else out.d2[c].row(i) = ((jp.d1[c] - jm.d1[c]) / (2 * h)).transpose();
    }
  }
  if (order == 2)
    for (auto& m : out.d2) m = (0.5 * (m + m.transpose())).eval();
  return out;
}

namespace {

class CoefficientForm : public FormSource {
 public:
  CoefficientForm(int n, int p, std::vector<ScalarField> c) : n_(n), p_(p), c_(std::move(c)) {}
  int dim() const override { return n_; }
  int degree() const override { return p_; }
  int max_order() const override { return 2; }
  FormJet eval(const Vec& x, int order) const override {
    FormJet j = FormJet::zero(n_, p_, order);
    for (std::size_t i = 0; i < c_.size(); ++i) {
      Vec g;
      Mat h;
      c_[i].jet(x, order, j.v[i], g, h);
      if (order >= 1) j.d1[i] = g;
      if (order >= 2) j.d2[i] = h;
    }
    return j;
  }

 private:
  int n_, p_;
  std::vector<ScalarField> c_;
};

class ScaledForm : public FormSource {
 public:
  ScaledForm(FormField w, double s) : w_(std::move(w)), s_(s) {}
  int dim() const override { return w_.dim(); }
  int degree() const override { return w_.degree(); }
  int max_order() const override { return w_.analytic_order(); }
  FormJet eval(const Vec& x, int order) const override {
    FormJet j = w_.jet(x, order);
    for (auto& v : j.v) v *= s_;
    for (auto& v : j.d1) v *= s_;
    for (auto& v : j.d2) v *= s_;
    return j;
  }

 private:
  FormField w_;
  double s_;
};

class SumForm : public FormSource {
 public:
  SumForm(FormField a, FormField b) : a_(std::move(a)), b_(std::move(b)) {}
  int dim() const override { return a_.dim(); }
  int degree() const override { return a_.degree(); }
  int max_order() const override { return std::min(a_.analytic_order(), b_.analytic_order()); }
  FormJet eval(const Vec& x, int order) const override {
    FormJet j = a_.jet(x, order), k = b_.jet(x, order);
    for (std::size_t i = 0; i < j.v.size(); ++i) {
      j.v[i] += k.v[i];
      if (order >= 1) j.d1[i] += k.d1[i];
      if (order >= 2) j.d2[i] += k.d2[i];
    }
    return j;
  }

 private:
  FormField a_, b_;
};

class DerivativeForm : public FormSource {
 public:
  explicit DerivativeForm(FormField w) : w_(std::move(w)) {}
  int dim() const override { return w_.dim(); }
  int degree() const override { return w_.degree() + 1; }
  int max_order() const override { return std::max(0, w_.analytic_order() - 1); }
  FormJet eval(const Vec& x, int order) const override {
    const int n = dim(), p = w_.degree();
    FormJet src = w_.jet(x, order + 1);
    FormJet out = FormJet::zero(n, p + 1, order);
    const auto& K = subsets(n, p + 1);
    for (std::size_t k = 0; k < K.size(); ++k) {
      for (int j : subset_members(K[k])) {
        unsigned J = K[k] & ~(1u << j);
        int c = subset_index(n, J);
        double s = concat_sign(1u << j, J);
        out.v[k] += s * src.d1[c][j];
        if (order >= 1) out.d1[k] += s * src.d2[c].row(j).transpose();
      }
    }
    return out;
  }

 private:
  FormField w_;
};

Eigen::MatrixXd d_matrix_of(const Mat& g, const Mat& dg, int p, HodgeFlavor flavor) {
  const Eigen::Index rows = binom(static_cast<int>(g.rows()), static_cast<int>(g.rows()) - p);
  const Eigen::Index cols = binom(static_cast<int>(g.rows()), p);
  if (flavor == HodgeFlavor::flat_chart) return Eigen::MatrixXd::Zero(rows, cols);
  double dn = dg.norm();
  if (dn == 0.0) return Eigen::MatrixXd::Zero(rows, cols);
  double t = 1e-5 * g.norm() / dn;
  return (hodge_matrix(Mat(g + t * dg), p, flavor) - hodge_matrix(Mat(g - t * dg), p, flavor)) / (2 * t);
}

class CodifferentialForm : public FormSource {
 public:
  CodifferentialForm(Manifold M, FormField w, HodgeFlavor f) : M_(std::move(M)), w_(std::move(w)), f_(f) {}
  int dim() const override { return w_.dim(); }
  int degree() const override { return w_.degree() - 1; }
  int max_order() const override { return 0; }
  FormJet eval(const Vec& x, int order) const override {
    (void)order;
    const int n = dim(), p = w_.degree();
    FormJet a = w_.jet(x, 1);
    Mat g = M_.metric(x);
    Rank3 dg = M_.partials(x);
    Eigen::MatrixXd S = hodge_matrix(g, p, f_);
    const int q = n - p;  // degree of *w
    Eigen::VectorXd av = Eigen::Map<const Eigen::VectorXd>(a.v.data(), static_cast<Eigen::Index>(a.v.size()));
    // partials of the coefficients of *w
    std::vector<Eigen::VectorXd> dstar(n);
    for (int j = 0; j < n; ++j) {
      Eigen::VectorXd daj(av.size());
      for (Eigen::Index c = 0; c < av.size(); ++c) daj[c] = a.d1[c][j];
      dstar[j] = d_matrix_of(g, dg.slice(j), p, f_) * av + S * daj;
    }
    // d(*w), degree q + 1
    const auto& K = subsets(n, q + 1);
    std::vector<double> dsw(K.size(), 0.0);
    for (std::size_t k = 0; k < K.size(); ++k)
      for (int j : subset_members(K[k])) {
        unsigned J = K[k] & ~(1u << j);
        dsw[k] += concat_sign(1u << j, J) * dstar[j][subset_index(n, J)];
      }
    // *^{-1} on (q+1)-forms is (-1)^{(q+1)(n-q-1)} *
    const int r = q + 1;
    double sign = ((r * (n - r)) % 2 ? -1.0 : 1.0) * ((p % 2) ? -1.0 : 1.0);
    std::vector<double> out = hodge_star(g, r, dsw, f_);
    FormJet j = FormJet::zero(n, p - 1, 0);
    for (std::size_t i = 0; i < out.size(); ++i) j.v[i] = sign * out[i];
    return j;
  }

 private:
  Manifold M_;
  FormField w_;
  HodgeFlavor f_;
};

double minor_det(const Mat& m, unsigned rows, unsigned cols) {
  auto r = subset_members(rows), c = subset_members(cols);
  const int k = static_cast<int>(r.size());
  if (k == 0) return 1.0;
  Mat sub(k, k);
  for (int a = 0; a < k; ++a)
    for (int b = 0; b < k; ++b) sub(a, b) = m(r[a], c[b]);
  return sub.determinant();
}

class PulledBackForm : public FormSource {
 public:
  PulledBackForm(FormField w, Vec c, Mat L) : w_(std::move(w)), c_(std::move(c)), L_(std::move(L)) {
    const int n = dim(), p = degree();
    const auto& I = subsets(n, p);
    P_ = Eigen::MatrixXd(I.size(), I.size());
    // dx^J = sum_{J'} det(L[J, J']) dz^{J'}
    for (std::size_t a = 0; a < I.size(); ++a)
      for (std::size_t b = 0; b < I.size(); ++b) P_(b, a) = minor_det(L_, I[a], I[b]);
  }
  int dim() const override { return w_.dim(); }
  int degree() const override { return w_.degree(); }
  int max_order() const override { return w_.analytic_order(); }
  FormJet eval(const Vec& z, int order) const override {
    FormJet y = w_.jet(c_ + L_ * z, order);
    FormJet out = FormJet::zero(dim(), degree(), order);
    for (Eigen::Index b = 0; b < P_.rows(); ++b)
      for (Eigen::Index a = 0; a < P_.cols(); ++a) {
        double m = P_(b, a);
        if (m == 0.0) continue;
        out.v[b] += m * y.v[a];
        if (order >= 1) out.d1[b] += m * (L_.transpose() * y.d1[a]);
        if (order >= 2) out.d2[b] += m * (L_.transpose() * y.d2[a] * L_);
      }
    return out;
  }

 private:
  FormField w_;
  Vec c_;
  Mat L_;
  Eigen::MatrixXd P_;
};

}  // namespace

FormField make_form(int n, int p, std::vector<ScalarField> coeffs) {
  if (p < 0 || p > n) throw ParameterError("form degree out of range");
  if (static_cast<int>(coeffs.size()) != binom(n, p)) throw ParameterError("need C(n,p) coefficients");
  Box s{Vec::Constant(n, kInf), Vec::Constant(n, -kInf)};
  for (const auto& c : coeffs) {
    if (c.dim() != n) throw ParameterError("coefficient dimension mismatch");
    if (c.terms().empty()) continue;
    Box b = c.support();
    s.lo = s.lo.cwiseMin(b.lo);
    s.hi = s.hi.cwiseMax(b.hi);
  }
  return FormField(std::make_shared<CoefficientForm>(n, p, std::move(coeffs)), s);
}

FormField scalar_form(const ScalarField& u) { return make_form(u.dim(), 0, {u}); }

FormField scaled(const FormField& w, double lambda) {
  return FormField(std::make_shared<ScaledForm>(w, lambda), w.support());
}

FormField sum(const FormField& a, const FormField& b) {
  if (a.dim() != b.dim() || a.degree() != b.degree()) throw ParameterError("sum of incompatible forms");
  Box s{a.support().lo.cwiseMin(b.support().lo), a.support().hi.cwiseMax(b.support().hi)};
  return FormField(std::make_shared<SumForm>(a, b), s);
}

FormField exterior_derivative(const FormField& w) {
  if (w.degree() >= w.dim()) throw ParameterError("exterior derivative of an n-form");
  return FormField(std::make_shared<DerivativeForm>(w), w.support());
}

Eigen::MatrixXd hodge_matrix(const Mat& g, int p, HodgeFlavor flavor) {
  const int n = static_cast<int>(g.rows());
  const auto& I = subsets(n, p);
  const auto& Kc = subsets(n, n - p);
  Eigen::MatrixXd S = Eigen::MatrixXd::Zero(Kc.size(), I.size());
  const unsigned full = full_mask(n);
  if (flavor == HodgeFlavor::flat_chart) {
    for (std::size_t a = 0; a < I.size(); ++a)
      S(subset_index(n, full & ~I[a]), a) = concat_sign(I[a], full & ~I[a]);
    return S;
  }
  Mat gi = g.inverse();
  double vol = std::sqrt(g.determinant());
  for (std::size_t a = 0; a < I.size(); ++a) {      // output index I^c
    unsigned Ic = full & ~I[a];
    double e = vol * concat_sign(I[a], Ic);
    for (std::size_t b = 0; b < I.size(); ++b)      // input index J
      S(subset_index(n, Ic), b) = e * minor_det(gi, I[a], I[b]);
  }
  return S;
}

std::vector<double> hodge_star(const Mat& g, int p, const std::vector<double>& a, HodgeFlavor flavor) {
  Eigen::MatrixXd S = hodge_matrix(g, p, flavor);
  Eigen::VectorXd v = S * Eigen::Map<const Eigen::VectorXd>(a.data(), static_cast<Eigen::Index>(a.size()));
  return std::vector<double>(v.data(), v.data() + v.size());
}

std::vector<double> hodge_star(const Manifold& M, const Vec& x, int p, const std::vector<double>& a,
                               HodgeFlavor flavor) {
  return hodge_star(M.metric(x), p, a, flavor);
}

FormField codifferential(const Manifold& M, const FormField& w, HodgeFlavor flavor) {
  if (w.degree() < 1) throw ParameterError("codifferential of a 0-form");
  if (w.dim() != M.dim()) throw ParameterError("form and manifold dimensions differ");
  return FormField(std::make_shared<CodifferentialForm>(M, w, flavor), w.support());
}

FormField pullback_affine(const FormField& w, const Vec& c, const Mat& L) {
  const int n = w.dim();
  Mat Li = L.inverse();
  Box s = w.support();
  Box out{Vec::Constant(n, kInf), Vec::Constant(n, -kInf)};
  if (!s.bounded()) {
    out = Box::unbounded(n);
  } else {
    for (unsigned corner = 0; corner < (1u << n); ++corner) {
      Vec y(n);
      for (int i = 0; i < n; ++i) y[i] = (corner >> i & 1u) ? s.hi[i] : s.lo[i];
      Vec z = Li * (y - c);
      out.lo = out.lo.cwiseMin(z);
      out.hi = out.hi.cwiseMax(z);
    }
  }
  return FormField(std::make_shared<PulledBackForm>(w, c, L), out);
}

double form_inner(const Mat& g, int p, const std::vector<double>& a, const std::vector<double>& b) {
  const int n = static_cast<int>(g.rows());
  if (p == 0) return a[0] * b[0];
  const auto& I = subsets(n, p);
  Mat gi = g.inverse();
  double s = 0.0;
  for (std::size_t i = 0; i < I.size(); ++i) {
    if (a[i] == 0.0) continue;
    for (std::size_t j = 0; j < I.size(); ++j)
      if (b[j] != 0.0) s += a[i] * minor_det(gi, I[i], I[j]) * b[j];
  }
  return s;
}

double form_norm(const Mat& g, int p, const std::vector<double>& a) {
  return std::sqrt(std::max(0.0, form_inner(g, p, a, a)));
}

std::vector<double> wedge(int n, int p, const std::vector<double>& a, int q, const std::vector<double>& b) {
  if (p + q > n) return {};
  const auto& I = subsets(n, p);
  const auto& J = subsets(n, q);
  std::vector<double> out(binom(n, p + q), 0.0);
  for (std::size_t i = 0; i < I.size(); ++i)
    for (std::size_t j = 0; j < J.size(); ++j) {
      if (I[i] & J[j]) continue;
      out[subset_index(n, I[i] | J[j])] += concat_sign(I[i], J[j]) * a[i] * b[j];
    }
  return out;
}

}  // namespace wsob
