#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace decolab {

using cplx = std::complex<double>;
using CVec = Eigen::VectorXcd;
using RVec = Eigen::VectorXd;
using CMat = Eigen::MatrixXcd;
using RMat = Eigen::MatrixXd;

// Bad arguments, shapes or preconditions.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A computed quantity left its allowed envelope (trace drift, negative
// eigenvalue, step-size underflow ...).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct StateVector {
  std::string basis_id;
  CVec coeffs;
};

struct DensityOperator {
  std::string basis_id;
  CMat matrix;
};

inline DensityOperator projector(const StateVector& psi) {
  return {psi.basis_id, psi.coeffs * psi.coeffs.adjoint()};
}

struct ValidationReport {
  double hermiticity = 0;  // max |rho - rho^dagger|
  double trace_error = 0;  // |Tr rho - 1|
  double min_eigenvalue = 0;
};

ValidationReport inspect(const CMat& rho);

// Throws NumericalError when the operator violates the given tolerances.
void validate_density(const CMat& rho, double herm_tol, double trace_tol, double eig_floor,
                      const std::string& context);

}  // namespace decolab
