#include "qbary/matcore.hpp"

#include <cmath>
#include <stdexcept>

namespace qbary {

Tolerance::Tolerance(double a, double r) : atol(a), rtol(r) {
  if (!(a > 0.0) || !(r > 0.0))
    throw std::invalid_argument("Tolerance: atol and rtol must be positive");
}

double max_norm(const ComplexMatrix& a) {
  if (a.size() == 0) return 0.0;
  return a.cwiseAbs().maxCoeff();
}

double spectral_norm(const ComplexMatrix& a) {
  if (a.size() == 0) return 0.0;
  Eigen::JacobiSVD<ComplexMatrix> svd(a);
  return svd.singularValues()(0);
}

bool all_finite(const ComplexMatrix& a) {
  for (Eigen::Index j = 0; j < a.cols(); ++j)
    for (Eigen::Index i = 0; i < a.rows(); ++i)
      if (!std::isfinite(a(i, j).real()) || !std::isfinite(a(i, j).imag()))
        return false;
  return true;
}

ComplexVector vectorize(const ComplexMatrix& a) {
  return Eigen::Map<const ComplexVector>(a.data(), a.size());
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

bool is_hermitian(const ComplexMatrix& a, const Tolerance& tol) {
  if (a.rows() != a.cols()) return false;
  if (!all_finite(a)) return false;
  const double dev = max_norm(a - a.adjoint());
  return dev <= tol.threshold(spectral_norm(a));
}

bool is_psd(const ComplexMatrix& a, const Tolerance& tol) {
  if (!is_hermitian(a, tol))
    throw std::invalid_argument("is_psd: input is not Hermitian at tolerance");
  if (a.rows() == 0) return true;
  return min_eigenvalue(a) >= -tol.threshold(spectral_norm(a));
}

double min_eigenvalue(const ComplexMatrix& a_hermitian) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(a_hermitian,
                                                  Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("min_eigenvalue: eigensolver failed");
  return es.eigenvalues()(0);
}

int rank(const ComplexMatrix& a, const Tolerance& tol) {
  if (a.size() == 0) return 0;
  Eigen::JacobiSVD<ComplexMatrix> svd(a);
  const Eigen::VectorXd& sv = svd.singularValues();
  const double thr = tol.threshold(sv(0));
  int r = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > thr) ++r;
  return r;
}

std::vector<ComplexVector> nullspace(const ComplexMatrix& a,
                                     const Tolerance& tol) {
  std::vector<ComplexVector> basis;
  if (a.cols() == 0) return basis;
  Eigen::JacobiSVD<ComplexMatrix> svd(a, Eigen::ComputeFullV);
  const Eigen::VectorXd& sv = svd.singularValues();
  const double thr = sv.size() > 0 ? tol.threshold(sv(0)) : tol.atol;
  int r = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > thr) ++r;
  for (Eigen::Index j = r; j < a.cols(); ++j)
    basis.push_back(svd.matrixV().col(j));
  return basis;
}

ComplexMatrix partial_trace(const ComplexMatrix& a, int d1, int d2,
                            TraceSide side) {
  if (d1 <= 0 || d2 <= 0 || a.rows() != a.cols() ||
      a.rows() != static_cast<Eigen::Index>(d1) * d2)
    throw std::invalid_argument("partial_trace: dimension mismatch");
  if (side == TraceSide::Second) {
    ComplexMatrix out = ComplexMatrix::Zero(d1, d1);
    for (int m = 0; m < d1; ++m)
      for (int n = 0; n < d1; ++n)
        for (int j = 0; j < d2; ++j)
          out(m, n) += a(m * d2 + j, n * d2 + j);
    return out;
  }
  ComplexMatrix out = ComplexMatrix::Zero(d2, d2);
  for (int j = 0; j < d2; ++j)
    for (int k = 0; k < d2; ++k)
      for (int m = 0; m < d1; ++m)
        out(j, k) += a(m * d2 + j, m * d2 + k);
  return out;
}

Eigh eigh(const ComplexMatrix& a, const Tolerance& tol) {
  if (!is_hermitian(a, tol))
    throw std::invalid_argument("eigh: input is not Hermitian at tolerance");
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(a);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("eigh: eigensolver failed");
  return Eigh{es.eigenvalues(), es.eigenvectors()};
}

}  // namespace qbary
