// Dense complex linear algebra shared by every module: matrix aliases, the
// error type, and thin LAPACK wrappers for the Hermitian eigenproblem and
// singular values.
#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace qhall {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

enum class ErrorKind {
  InvalidArgument,
  GapClosed,
  NotAProjection,
  DimensionMismatch,
  AssumptionsViolated,
  DifferentP,
  InsufficientRange,
  InsufficientGrid,
  ConditionUnsatisfied,
  QuadratureUnresolved,
  SolverFailure,
  ConfigInvalid,
  IoFailure,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Eigenvalues ascending, eigenvectors as columns (LAPACK zheevr).
struct EigenPairs {
  RVector values;
  CMatrix vectors;
};

EigenPairs hermitian_eigen(const CMatrix& h);
RVector hermitian_eigenvalues(const CMatrix& h);
RVector singular_values(const CMatrix& m);

/// (M + M*)/2, which is Hermitian bit-for-bit.
CMatrix hermitize(const CMatrix& m);

inline CMatrix commutator(const CMatrix& a, const CMatrix& b) { return a * b - b * a; }
inline CMatrix anticommutator(const CMatrix& a, const CMatrix& b) { return a * b + b * a; }

/// Diagonal of a*b without forming the product.
CVector diagonal_of_product(const CMatrix& a, const CMatrix& b);

/// V diag(f) V*.
CMatrix reconstruct(const CMatrix& vectors, const RVector& weights);

double hermiticity_defect(const CMatrix& m);

}  // namespace qhall
