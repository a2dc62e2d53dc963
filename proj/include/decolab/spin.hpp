#pragma once

#include <array>
#include <vector>

#include "decolab/lindblad.hpp"
#include "decolab/types.hpp"

namespace decolab::spin {

// Symmetric Dicke ladder |j,m>, index a = m + j, m ascending from -j.
struct SpinBasis {
  double j = 0.5;

  explicit SpinBasis(double j);
  int dim() const;
  std::string id() const;
};

struct JOperators {
  RMat Jp, Jm, Jz;
};

JOperators j_operators(double j);

// tau = tan(beta/2) exp(-i phi); beta = 0 is |j,-j>. The Bloch vector points
// along (sin beta cos phi, sin beta sin phi, -cos beta).
struct CoherentLabel {
  double beta = 0;
  double phi = 0;

  static CoherentLabel from_tau(cplx tau);
  static CoherentLabel from_angles(double beta, double phi) { return {beta, phi}; }
  cplx tau() const;
};

StateVector coherent_state(const CoherentLabel& label, const SpinBasis& basis);
// <tau1|tau2> in closed form.
cplx overlap(const CoherentLabel& a, const CoherentLabel& b, double j);

StateVector cat2(const CoherentLabel& a, const CoherentLabel& b, const SpinBasis& basis);
StateVector cat4(const std::array<CoherentLabel, 4>& labels, const SpinBasis& basis);

// Regular tetrahedron with the v0-v1 edge along z and the v2-v3 edge along y.
std::array<CoherentLabel, 4> tetrahedron_labels();
// Unit Bloch direction of a label.
std::array<double, 3> bloch_direction(const CoherentLabel& label);

// <J+J-> - <J+><J->
double entanglement_rate(const StateVector& state, const SpinBasis& basis);
double entanglement_rate(const CMat& rho, const SpinBasis& basis);
// <J-J+> - <J-><J+>
double reverse_correlation(const CMat& rho, const SpinBasis& basis);

// Initial d/dt Tr(rho - rho^2) under the Dicke master equation for a pure state.
double slin_rate_t0(const CMat& rho, double gamma, double n_bar, const SpinBasis& basis);

DensityOperator classical_mixture(const CoherentLabel& a, const CoherentLabel& b,
                                  const SpinBasis& basis);
// Tr[(rho - sigma)^2]
double distance(const CMat& rho, const CMat& sigma);

lindblad::Trajectory evolved_classical_reference(const CoherentLabel& a, const CoherentLabel& b,
                                                 const lindblad::DickeGenerator& gen,
                                                 const std::vector<double>& t_grid,
                                                 const lindblad::IntegratorOptions& opts = {});

}  // namespace decolab::spin
