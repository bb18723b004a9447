#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

namespace qbary {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

// Absolute + relative tolerance pair used by every toleranced predicate in the
// toolkit.  The relative part is anchored to the largest singular value of the
// matrix under test so that predicates are scale-covariant.
struct Tolerance {
  double atol = 1e-10;
  double rtol = 1e-10;

  Tolerance() = default;
  Tolerance(double a, double r);

  double threshold(double scale) const { return atol + rtol * scale; }
};

// max |a_ij| (Chebyshev norm); 0 for empty matrices.
double max_norm(const ComplexMatrix& a);

// Largest singular value.
double spectral_norm(const ComplexMatrix& a);

bool all_finite(const ComplexMatrix& a);

// Column-stacking vectorization, so vec(A B C) = (C^T (x) A) vec(B).
ComplexVector vectorize(const ComplexMatrix& a);

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);

bool is_hermitian(const ComplexMatrix& a, const Tolerance& tol = {});

// Requires a Hermitian input (throws std::invalid_argument otherwise).
// Accepts eigenvalues down to -(atol + rtol * sigma_max).
bool is_psd(const ComplexMatrix& a, const Tolerance& tol = {});

// Signed PSD margin: the smallest eigenvalue of a Hermitian matrix.  Exposed
// because boundary searches need the sign and magnitude, not just the verdict.
double min_eigenvalue(const ComplexMatrix& a_hermitian);

// Number of singular values above atol + rtol * sigma_max.
int rank(const ComplexMatrix& a, const Tolerance& tol = {});

// Orthonormal basis of {v : A v ~ 0} at the same threshold as rank(), so
// rank(A) + nullspace(A).size() == cols(A) for every A.
std::vector<ComplexVector> nullspace(const ComplexMatrix& a,
                                     const Tolerance& tol = {});

enum class TraceSide { First, Second };

// Partial trace of an operator on C^{d1} (x) C^{d2}, removing the requested
// tensor factor.  Index convention: composite index i = i1 * d2 + i2.
ComplexMatrix partial_trace(const ComplexMatrix& a, int d1, int d2,
                            TraceSide side);

struct Eigh {
  Eigen::VectorXd values;   // ascending
  ComplexMatrix vectors;    // columns are the matching orthonormal eigenvectors
};

// Hermitian eigendecomposition; throws std::invalid_argument when the input is
// not Hermitian within tol.
Eigh eigh(const ComplexMatrix& a, const Tolerance& tol = {});

}  // namespace qbary
