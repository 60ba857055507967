#include "kickho/linalg.hpp"

#include <lapacke.h>

#include <sstream>

#include "kickho/error.hpp"

extern "C" {
void openblas_set_num_threads(int);
int openblas_get_num_threads(void);
}

namespace kickho::linalg {

SymmetricEigen symmetric_eigen(const RealMatrix& a, const std::string& context) {
  const auto n = static_cast<lapack_int>(a.rows());
  if (a.rows() != a.cols()) throw DimensionError(context + ": matrix is not square");
  SymmetricEigen out;
  out.vectors = a;
  out.values.resize(n);
  if (n == 0) return out;
  const lapack_int info = LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'V', 'L', n, out.vectors.data(), n,
                                         out.values.data());
  if (info != 0) {
    std::ostringstream os;
    os << context << ": symmetric eigensolver failed (dsyevd info=" << info << ")";
    throw NumericError(os.str());
  }
  return out;
}

ComplexSchur complex_schur(const ComplexMatrix& a, const std::string& context) {
  const auto n = static_cast<lapack_int>(a.rows());
  if (a.rows() != a.cols()) throw DimensionError(context + ": matrix is not square");
  ComplexSchur out;
  out.t = a;
  out.z.resize(n, n);
  if (n == 0) return out;
  ComplexVector w(n);
  lapack_int sdim = 0;
  const lapack_int info = LAPACKE_zgees(
      LAPACK_COL_MAJOR, 'V', 'N', nullptr, n, reinterpret_cast<lapack_complex_double*>(out.t.data()),
      n, &sdim, reinterpret_cast<lapack_complex_double*>(w.data()),
      reinterpret_cast<lapack_complex_double*>(out.z.data()), n);
  if (info != 0) {
    std::ostringstream os;
    os << context << ": complex Schur decomposition failed (zgees info=" << info << ")";
    throw NumericError(os.str());
  }
  return out;
}

int set_blas_threads(int n) {
  const int previous = openblas_get_num_threads();
  openblas_set_num_threads(n < 1 ? 1 : n);
  return previous;
}

double unitarity_defect(const ComplexMatrix& a) {
  const ComplexMatrix g = a.adjoint() * a;
  return (g - ComplexMatrix::Identity(a.rows(), a.cols())).cwiseAbs().maxCoeff();
}

}  // namespace kickho::linalg
