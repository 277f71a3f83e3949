#include "wsob/linalg.hpp"

namespace wsob {

EigenRange eigen_range(const Mat& m) {
  Eigen::SelfAdjointEigenSolver<Mat> es(m, Eigen::EigenvaluesOnly);
  const auto& ev = es.eigenvalues();
  return {ev.minCoeff(), ev.maxCoeff()};
}

namespace {

Mat sym_pow(const Mat& m, double e) {
  Eigen::SelfAdjointEigenSolver<Mat> es(m);
  const Vec& ev = es.eigenvalues();
  if (ev.minCoeff() <= 0.0) throw NumericalError("matrix is not positive definite");
  Vec d = ev.array().pow(e).matrix();
  return es.eigenvectors() * d.asDiagonal() * es.eigenvectors().transpose();
}

}  // namespace

Mat sym_sqrt(const Mat& m) { return sym_pow(m, 0.5); }
Mat sym_inv_sqrt(const Mat& m) { return sym_pow(m, -0.5); }

}  // namespace wsob
