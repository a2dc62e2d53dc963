#include <sstream>

#include "decolab/types.hpp"

namespace decolab {

ValidationReport inspect(const CMat& rho) {
  ValidationReport r;
  if (rho.size() == 0) return r;
  r.hermiticity = (rho - rho.adjoint()).cwiseAbs().maxCoeff();
  r.trace_error = std::abs(rho.trace() - cplx(1, 0));
  CMat h = 0.5 * (rho + rho.adjoint());
  Eigen::SelfAdjointEigenSolver<CMat> es(h, Eigen::EigenvaluesOnly);
  r.min_eigenvalue = es.eigenvalues().minCoeff();
  return r;
}

void validate_density(const CMat& rho, double herm_tol, double trace_tol, double eig_floor,
                      const std::string& context) {
  if (rho.rows() != rho.cols()) throw InputError(context + ": density operator not square");
  auto r = inspect(rho);
  std::ostringstream os;
  if (!(r.hermiticity <= herm_tol))
    os << "hermiticity violation " << r.hermiticity << " (tol " << herm_tol << ")";
  else if (!(r.trace_error <= trace_tol))
    os << "trace violation " << r.trace_error << " (tol " << trace_tol << ")";
  else if (!(r.min_eigenvalue >= eig_floor))
    os << "negative eigenvalue " << r.min_eigenvalue << " (floor " << eig_floor << ")";
  else
    return;
  throw NumericalError(context + ": " + os.str());
}

}  // namespace decolab
