#include "wsob/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace wsob {

Rank3 christoffel(const Mat& g, const Rank3& dg) {
  const int n = static_cast<int>(g.rows());
  Eigen::LLT<Mat> llt(g);
  if (llt.info() != Eigen::Success) throw NumericalError("singular metric");
  Mat gi = llt.solve(Mat::Identity(n, n));
  Rank3 G(n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      Vec low(n);
      for (int l = 0; l < n; ++l) low[l] = 0.5 * (dg(i, j, l) + dg(j, i, l) - dg(l, i, j));
      Vec up = gi * low;
      for (int k = 0; k < n; ++k) {
        G(k, i, j) = up[k];
        G(k, j, i) = up[k];
      }
    }
  return G;
}

Rank3 christoffel(const Manifold& M, const Vec& x) { return christoffel(M.metric(x), M.partials(x)); }

Rank3 christoffel(const Manifold& M, const Point& p) {
  return christoffel(metric_at(M, p), metric_partials_at(M, p));
}

Rank4 riemann(const Manifold& M, const Vec& x, double h) {
  const int n = M.dim();
  std::vector<Rank3> dG;
  for (int m = 0; m < n; ++m) {
    Vec xp = x, xm = x;
    xp[m] += h;
    xm[m] -= h;
    Rank3 a = christoffel(M, xp), b = christoffel(M, xm), d(n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) d(i, j, k) = (a(i, j, k) - b(i, j, k)) / (2 * h);
    dG.push_back(d);
  }
  Rank3 G = christoffel(M, x);
  Rank4 R(n);
  for (int l = 0; l < n; ++l)
    for (int k = 0; k < n; ++k)
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          double s = dG[i](l, j, k) - dG[j](l, i, k);
          for (int m = 0; m < n; ++m) s += G(l, i, m) * G(m, j, k) - G(l, j, m) * G(m, i, k);
          R(l, k, i, j) = s;
        }
  return R;
}

namespace {

// <R(v,w)w, v>
double rvwwv(const Rank4& R, const Mat& g, const Vec& v, const Vec& w) {
  const int n = R.dim();
  Vec out = Vec::Zero(n);  // R(v,w)w, upper index
  for (int l = 0; l < n; ++l)
    for (int k = 0; k < n; ++k)
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) out[l] += R(l, k, i, j) * v[i] * w[j] * w[k];
  return out.dot(g * v);
}

}  // namespace

double sectional_curvature(const Manifold& M, const Vec& x, const Vec& v, const Vec& w) {
  Mat g = M.metric(x);
  double vv = v.dot(g * v), ww = w.dot(g * w), vw = v.dot(g * w);
  double area = vv * ww - vw * vw;
  if (area <= 1e-10 * vv * ww) throw ParameterError("degenerate plane");
  return rvwwv(riemann(M, x), g, v, w) / area;
}

Mat ricci(const Manifold& M, const Vec& x) {
  const int n = M.dim();
  if (n < 2) throw ParameterError("Ricci curvature needs n >= 2");
  Rank4 R = riemann(M, x);
  Mat Rc = Mat::Zero(n, n);
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) Rc(k, j) += R(i, k, i, j);
  Rc = 0.5 * (Rc + Rc.transpose()) / (n - 1);
  return Rc;
}

Vec ricci_eigenvalues(const Manifold& M, const Vec& x) {
  Mat L = sym_inv_sqrt(M.metric(x));
  Mat A = L * ricci(M, x) * L;
  Eigen::SelfAdjointEigenSolver<Mat> es(A, Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

TensorValue TensorValue::zero(int n, int p, int extra, const Vec& base) {
  TensorValue t;
  t.n = n;
  t.p = p;
  t.extra = extra;
  std::size_t N = 1;
  for (int i = 0; i < p + extra; ++i) N *= static_cast<std::size_t>(n);
  t.comps.assign(N, 0.0);
  t.base = base;
  return t;
}

namespace {

std::size_t ipow(int n, int r) {
  std::size_t s = 1;
  for (int i = 0; i < r; ++i) s *= static_cast<std::size_t>(n);
  return s;
}

void unflatten(std::size_t idx, int n, int r, int* out) {
  for (int s = r - 1; s >= 0; --s) {
    out[s] = static_cast<int>(idx % n);
    idx /= n;
  }
}

// Contract every slot with F (F F^T = g^{-1}).
std::vector<double> orthonormal_components(const Mat& g, const TensorValue& T) {
  const int n = T.n, r = T.rank();
  Eigen::LLT<Mat> llt(g);
  if (llt.info() != Eigen::Success) throw NumericalError("metric is not positive definite");
  Mat C = llt.matrixL();
  Mat F = C.inverse().transpose();
  std::vector<double> cur = T.comps, next(cur.size());
  const std::size_t N = cur.size();
  for (int s = 0; s < r; ++s) {
    const std::size_t stride = ipow(n, r - 1 - s);
    std::fill(next.begin(), next.end(), 0.0);
    for (std::size_t idx = 0; idx < N; ++idx) {
      int a = static_cast<int>((idx / stride) % n);
      std::size_t base = idx - static_cast<std::size_t>(a) * stride;
      double v = cur[idx];
      if (v == 0.0) continue;
      for (int b = 0; b < n; ++b) next[base + b * stride] += v * F(a, b);
    }
    std::swap(cur, next);
  }
  return cur;
}

double factorial(int p) {
  double f = 1.0;
  for (int i = 2; i <= p; ++i) f *= i;
  return f;
}

}  // namespace

TensorValue form_tensor(int n, int p, const std::vector<double>& coeffs, const Vec& base) {
  TensorValue t = TensorValue::zero(n, p, 0, base);
  int idx[kMaxDim + 2];
  for (std::size_t f = 0; f < t.comps.size(); ++f) {
    unflatten(f, n, p, idx);
    unsigned mask = 0;
    bool distinct = true;
    int inv = 0;
    for (int a = 0; a < p; ++a) {
      if (mask & (1u << idx[a])) distinct = false;
      mask |= 1u << idx[a];
      for (int b = a + 1; b < p; ++b)
        if (idx[a] > idx[b]) ++inv;
    }
    if (!distinct) continue;
    t.comps[f] = (inv % 2 ? -1.0 : 1.0) * coeffs[subset_index(n, mask)];
  }
  return t;
}

double pointwise_norm(const Mat& g, const TensorValue& T) {
  auto c = orthonormal_components(g, T);
  double s = 0.0;
  for (double v : c) s += v * v;
  return std::sqrt(s / factorial(T.p));
}

double pointwise_norm(const Manifold& M, const TensorValue& T) { return pointwise_norm(M.metric(T.base), T); }

double tensor_inner(const Mat& g, const TensorValue& a, const TensorValue& b) {
  if (a.comps.size() != b.comps.size() || a.p != b.p) throw ParameterError("tensor shapes differ");
  auto ca = orthonormal_components(g, a), cb = orthonormal_components(g, b);
  double s = 0.0;
  for (std::size_t i = 0; i < ca.size(); ++i) s += ca[i] * cb[i];
  return s / factorial(a.p);
}

namespace {

// (nabla T)_{I k} = d_k T_I - sum_s Gamma^l_{k i_s} T_{..l..}, given dT[k].
TensorValue connect(const Rank3& G, const TensorValue& T, const std::vector<std::vector<double>>& dT) {
  const int n = T.n, r = T.rank();
  TensorValue out = TensorValue::zero(n, T.p, T.extra + 1, T.base);
  int idx[kMaxDim + 3];
  for (std::size_t f = 0; f < T.comps.size(); ++f) {
    unflatten(f, n, r, idx);
    for (int k = 0; k < n; ++k) {
      double v = dT[k][f];
      for (int s = 0; s < r; ++s) {
        const std::size_t stride = ipow(n, r - 1 - s);
        std::size_t base = f - static_cast<std::size_t>(idx[s]) * stride;
        for (int l = 0; l < n; ++l) v -= G(l, k, idx[s]) * T.comps[base + l * stride];
      }
      out.comps[f * n + k] = v;
    }
  }
  return out;
}

}  // namespace

TensorValue covariant_derivative(const Manifold& M, const FormField& w, const Vec& x) {
  const int n = M.dim(), p = w.degree();
  FormJet j = w.jet(x, 1);
  TensorValue T = form_tensor(n, p, j.v, x);
  bool zero = std::all_of(j.v.begin(), j.v.end(), [](double v) { return v == 0.0; }) &&
              std::all_of(j.d1.begin(), j.d1.end(), [](const Vec& v) { return v.isZero(0.0); });
  if (zero) return TensorValue::zero(n, p, 1, x);
  std::vector<std::vector<double>> dT(n);
  for (int k = 0; k < n; ++k) {
    std::vector<double> c(j.v.size());
    for (std::size_t a = 0; a < c.size(); ++a) c[a] = j.d1[a][k];
    dT[k] = form_tensor(n, p, c, x).comps;
  }
  return connect(christoffel(M, x), T, dT);
}

TensorValue nabla(const Manifold& M, const FormField& w, const Vec& x, int order) {
  const int n = M.dim();
  if (order == 0) return form_tensor(n, w.degree(), w.value(x), x);
  if (order == 1) return covariant_derivative(M, w, x);
  if (order != 2) throw ParameterError("nabla order must be 0, 1 or 2");
  TensorValue T = covariant_derivative(M, w, x);
  std::vector<std::vector<double>> dT(n);
  const double h = kNablaStep;
  bool any = false;
  for (int k = 0; k < n; ++k) {
    Vec xp = x, xm = x;
    xp[k] += h;
    xm[k] -= h;
    TensorValue a = covariant_derivative(M, w, xp), b = covariant_derivative(M, w, xm);
    dT[k].resize(T.comps.size());
    for (std::size_t f = 0; f < T.comps.size(); ++f) {
      dT[k][f] = (a.comps[f] - b.comps[f]) / (2 * h);
      any = any || dT[k][f] != 0.0;
    }
  }
  if (!any && std::all_of(T.comps.begin(), T.comps.end(), [](double v) { return v == 0.0; }))
    return TensorValue::zero(n, w.degree(), 2, x);
  return connect(christoffel(M, x), T, dT);
}

CmtReport cmt_check(const Manifold& M, const AdmissibleBall& ball, const BallSampler& samples) {
  const int n = M.dim();
  const NormalizedFrame& F = ball.frame;
  CmtReport rep;
  rep.bound = 1.5 * (1.0 + ball.epsilon);
  Vec sup_dg = Vec::Zero(n);
  for (const Vec& z : samples.points()) {
    Vec y = F.to_chart(ball.radius * z);
    Mat gt = F.L * M.metric(y) * F.L;
    Rank3 dg = M.partials(y), dgt(n);
    for (int k = 0; k < n; ++k) {
      Mat s = Mat::Zero(n, n);
      for (int a = 0; a < n; ++a) s += F.L(a, k) * dg.slice(a);
      s = F.L * s * F.L;
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) dgt(k, i, j) = s(i, j);
      sup_dg[k] = std::max(sup_dg[k], s.cwiseAbs().maxCoeff());
    }
    rep.max_gamma = std::max(rep.max_gamma, christoffel(gt, dgt).max_abs());
  }
  rep.dg_sum = sup_dg.sum();
  if (rep.dg_sum == 0.0) {
    rep.vacuous = true;
    rep.note = "vacuous (flat)";
    return rep;
  }
  rep.ratio = rep.max_gamma / rep.dg_sum;
  rep.violated = rep.ratio > rep.bound;
  return rep;
}

}  // namespace wsob
