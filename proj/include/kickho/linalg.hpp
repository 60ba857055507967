#ifndef KICKHO_LINALG_HPP
#define KICKHO_LINALG_HPP

#include <complex>
#include <string>

#include <Eigen/Dense>

namespace kickho {

using cplx = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

namespace linalg {

struct SymmetricEigen {
  RealVector values;   // ascending
  RealMatrix vectors;  // orthonormal columns
};

/// Full eigendecomposition of a real symmetric matrix (LAPACK dsyevd).
/// Throws NumericError prefixed with `context` on failure.
SymmetricEigen symmetric_eigen(const RealMatrix& a, const std::string& context);

struct ComplexSchur {
  ComplexMatrix t;  // upper triangular
  ComplexMatrix z;  // unitary Schur vectors
};

/// Complex Schur form a = z t z^H (LAPACK zgees). For a normal matrix t is
/// diagonal up to rounding and the columns of z are orthonormal eigenvectors.
ComplexSchur complex_schur(const ComplexMatrix& a, const std::string& context);

/// Caps the BLAS/LAPACK worker count; returns the previous setting.
int set_blas_threads(int n);

/// max |a^H a - I|.
double unitarity_defect(const ComplexMatrix& a);

}  // namespace linalg
}  // namespace kickho

#endif
