#include "qhall/dense.hpp"

#include <complex>
#include <vector>

#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

namespace qhall {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::GapClosed: return "GapClosed";
    case ErrorKind::NotAProjection: return "NotAProjection";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::AssumptionsViolated: return "AssumptionsViolated";
    case ErrorKind::DifferentP: return "DifferentP";
    case ErrorKind::InsufficientRange: return "InsufficientRange";
    case ErrorKind::InsufficientGrid: return "InsufficientGrid";
    case ErrorKind::ConditionUnsatisfied: return "ConditionUnsatisfied";
    case ErrorKind::QuadratureUnresolved: return "QuadratureUnresolved";
    case ErrorKind::SolverFailure: return "SolverFailure";
    case ErrorKind::ConfigInvalid: return "ConfigInvalid";
    case ErrorKind::IoFailure: return "IoFailure";
  }
  return "Unknown";
}

namespace {

void require_square(const CMatrix& m, const char* who) {
  if (m.rows() != m.cols()) {
    throw Error(ErrorKind::DimensionMismatch, std::string(who) + ": matrix is not square");
  }
}

}  // namespace

namespace {

// zheevr (MRRR). The divide-and-conquer driver zheevd returns wrong
// eigenvectors above a few hundred rows with the OpenBLAS build used here.
lapack_int heevr(char jobz, CMatrix& a, RVector& values, CMatrix* vectors) {
  const lapack_int n = static_cast<lapack_int>(a.rows());
  lapack_int found = 0;
  std::vector<lapack_int> support(2 * static_cast<std::size_t>(n));
  lapack_complex_double* z = vectors ? reinterpret_cast<lapack_complex_double*>(vectors->data()) : nullptr;
  return LAPACKE_zheevr(LAPACK_COL_MAJOR, jobz, 'A', 'U', n, reinterpret_cast<lapack_complex_double*>(a.data()),
                        n, 0.0, 0.0, 0, 0, 0.0, &found, values.data(), z, vectors ? n : 1, support.data());
}

}  // namespace

EigenPairs hermitian_eigen(const CMatrix& h) {
  require_square(h, "hermitian_eigen");
  const Eigen::Index n = h.rows();
  EigenPairs out;
  out.values.resize(n);
  out.vectors.resize(n, n);
  if (n == 0) return out;
  CMatrix work = h;
  const lapack_int info = heevr('V', work, out.values, &out.vectors);
  if (info != 0) {
    throw Error(ErrorKind::SolverFailure, "zheevr returned " + std::to_string(info));
  }
  return out;
}

RVector hermitian_eigenvalues(const CMatrix& h) {
  require_square(h, "hermitian_eigenvalues");
  const Eigen::Index n = h.rows();
  RVector values(n);
  if (n == 0) return values;
  CMatrix work = h;
  const lapack_int info = heevr('N', work, values, nullptr);
  if (info != 0) {
    throw Error(ErrorKind::SolverFailure, "zheevr returned " + std::to_string(info));
  }
  return values;
}

RVector singular_values(const CMatrix& m) {
  const lapack_int rows = static_cast<lapack_int>(m.rows());
  const lapack_int cols = static_cast<lapack_int>(m.cols());
  const lapack_int k = std::min(rows, cols);
  RVector s(k);
  if (k == 0) return s;
  CMatrix work = m;
  lapack_int info = LAPACKE_zgesdd(LAPACK_COL_MAJOR, 'N', rows, cols, work.data(), rows,
                                   s.data(), nullptr, 1, nullptr, 1);
  if (info != 0) {
    throw Error(ErrorKind::SolverFailure, "zgesdd returned " + std::to_string(info));
  }
  return s;
}

CMatrix hermitize(const CMatrix& m) {
  require_square(m, "hermitize");
  CMatrix out(m.rows(), m.cols());
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      out(i, j) = 0.5 * (m(i, j) + std::conj(m(j, i)));
    }
  }
  return out;
}

CVector diagonal_of_product(const CMatrix& a, const CMatrix& b) {
  if (a.cols() != b.rows() || a.rows() != b.cols()) {
    throw Error(ErrorKind::DimensionMismatch, "diagonal_of_product");
  }
  // (ab)_ii = sum_k a_ik b_ki; transpose a so both walks are contiguous.
  const CMatrix at = a.transpose();
  CVector d(a.rows());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    d(i) = at.col(i).cwiseProduct(b.col(i)).sum();
  }
  return d;
}

CMatrix reconstruct(const CMatrix& vectors, const RVector& weights) {
  CMatrix scaled = vectors * weights.asDiagonal();
  return scaled * vectors.adjoint();
}

double hermiticity_defect(const CMatrix& m) {
  require_square(m, "hermiticity_defect");
  if (m.size() == 0) return 0.0;
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

}  // namespace qhall
