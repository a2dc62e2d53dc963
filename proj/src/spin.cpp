#include "decolab/spin.hpp"

#include <cmath>
#include <numbers>

#include "decolab/special.hpp"

namespace decolab::spin {

namespace {

int dim_of(double j) {
  const double twoj = 2 * j;
  if (!(j > 0) || std::fabs(twoj - std::round(twoj)) > 1e-12)
    throw InputError("spin: j must be a positive half-integer, got " + std::to_string(j));
  return static_cast<int>(std::lround(twoj)) + 1;
}

void require_dim(const CMat& rho, const SpinBasis& basis, const char* what) {
  if (rho.rows() != basis.dim() || rho.cols() != basis.dim())
    throw InputError(std::string(what) + ": operator dimension does not match 2j+1");
}

StateVector normalized_sum(const std::vector<StateVector>& parts, double norm2, const SpinBasis& basis,
                           const char* what) {
  if (!(norm2 > 1e-12)) throw InputError(std::string(what) + ": superposition has vanishing norm");
  CVec v = CVec::Zero(basis.dim());
  for (const auto& p : parts) v += p.coeffs;
  v /= std::sqrt(norm2);
  return {basis.id(), v};
}

// Tr(rho M) without the matrix product
cplx expect(const CMat& rho, const RMat& M) { return rho.cwiseProduct(M.transpose().cast<cplx>()).sum(); }

}  // namespace

SpinBasis::SpinBasis(double j_) : j(j_) { dim_of(j); }

int SpinBasis::dim() const { return dim_of(j); }

std::string SpinBasis::id() const { return "dicke:j=" + std::to_string(j); }

JOperators j_operators(double j) {
  const int d = dim_of(j);
  JOperators ops;
  ops.Jm = RMat::Zero(d, d);
  ops.Jz = RMat::Zero(d, d);
  for (int a = 0; a < d; ++a) {
    double m = -j + a;
    ops.Jz(a, a) = m;
    if (a > 0) ops.Jm(a - 1, a) = std::sqrt(j * (j + 1) - m * (m - 1));
  }
  ops.Jp = ops.Jm.transpose();
  return ops;
}

CoherentLabel CoherentLabel::from_tau(cplx tau) {
  if (!std::isfinite(tau.real()) || !std::isfinite(tau.imag())) throw InputError("tau not finite");
  return {2 * std::atan(std::abs(tau)), tau == 0.0 ? 0.0 : -std::arg(tau)};
}

cplx CoherentLabel::tau() const { return std::tan(beta / 2) * std::polar(1.0, -phi); }

StateVector coherent_state(const CoherentLabel& label, const SpinBasis& basis) {
  const int d = basis.dim();
  const double j = basis.j;
  const double s = std::sin(label.beta / 2), c = std::cos(label.beta / 2);
  const double ls = std::log(std::fabs(s)), lc = std::log(std::fabs(c));
  const int sgn_s = s < 0 ? -1 : 1, sgn_c = c < 0 ? -1 : 1;
  CVec v(d);
  for (int a = 0; a < d; ++a) {
    int up = a, down = d - 1 - a;  // j+m, j-m
    double lg = 0.5 * special::log_binomial(2 * j, up);
    double mag;
    if ((up > 0 && s == 0) || (down > 0 && c == 0))
      mag = 0;
    else
      mag = std::exp(lg + (up ? up * ls : 0.0) + (down ? down * lc : 0.0));
    int sg = ((up % 2 && sgn_s < 0) ? -1 : 1) * ((down % 2 && sgn_c < 0) ? -1 : 1);
    v[a] = sg * mag * std::polar(1.0, -up * label.phi);
  }
  return {basis.id(), v / v.norm()};
}

cplx overlap(const CoherentLabel& a, const CoherentLabel& b, double j) {
  dim_of(j);
  cplx base = std::cos(a.beta / 2) * std::cos(b.beta / 2) +
              std::sin(a.beta / 2) * std::sin(b.beta / 2) * std::polar(1.0, a.phi - b.phi);
  if (base == 0.0) return 0;
  return std::exp(2 * j * std::log(base));
}

StateVector cat2(const CoherentLabel& a, const CoherentLabel& b, const SpinBasis& basis) {
  double n2 = 2 * (1 + overlap(a, b, basis.j).real());
  return normalized_sum({coherent_state(a, basis), coherent_state(b, basis)}, n2, basis, "cat2");
}

StateVector cat4(const std::array<CoherentLabel, 4>& labels, const SpinBasis& basis) {
  double s = 0;
  for (int i = 0; i < 4; ++i)
    for (int k = 0; k < i; ++k) s += overlap(labels[i], labels[k], basis.j).real();
  std::vector<StateVector> parts;
  for (const auto& l : labels) parts.push_back(coherent_state(l, basis));
  return normalized_sum(parts, 2 * (2 + s), basis, "cat4");
}

std::array<double, 3> bloch_direction(const CoherentLabel& l) {
  return {std::sin(l.beta) * std::cos(l.phi), std::sin(l.beta) * std::sin(l.phi), -std::cos(l.beta)};
}

std::array<CoherentLabel, 4> tetrahedron_labels() {
  const double a = 1 / std::sqrt(3.0), b = std::sqrt(2.0 / 3.0);
  const double v[4][3] = {{a, 0, b}, {a, 0, -b}, {-a, b, 0}, {-a, -b, 0}};
  std::array<CoherentLabel, 4> out;
  for (int i = 0; i < 4; ++i) {
    double polar = std::acos(v[i][2]);
    out[i] = {std::numbers::pi - polar, std::atan2(v[i][1], v[i][0])};
  }
  return out;
}

double entanglement_rate(const CMat& rho, const SpinBasis& basis) {
  require_dim(rho, basis, "entanglement_rate");
  auto ops = j_operators(basis.j);
  cplx jp = expect(rho, ops.Jp);
  double A = expect(rho, ops.Jp * ops.Jm).real() - std::norm(jp);
  if (A < -1e-10) throw NumericalError("entanglement_rate: negative correlation " + std::to_string(A));
  return std::max(A, 0.0);
}

double entanglement_rate(const StateVector& state, const SpinBasis& basis) {
  return entanglement_rate(CMat(state.coeffs * state.coeffs.adjoint()), basis);
}

double reverse_correlation(const CMat& rho, const SpinBasis& basis) {
  require_dim(rho, basis, "reverse_correlation");
  auto ops = j_operators(basis.j);
  cplx jm = expect(rho, ops.Jm);
  return expect(rho, ops.Jm * ops.Jp).real() - std::norm(jm);
}

double slin_rate_t0(const CMat& rho, double gamma, double n_bar, const SpinBasis& basis) {
  require_dim(rho, basis, "slin_rate_t0");
  double purity = rho.cwiseAbs2().sum();
  if (std::fabs(purity - 1) > 1e-8) throw InputError("slin_rate_t0: input state is not pure");
  return 2 * gamma * ((n_bar + 1) * entanglement_rate(rho, basis) + n_bar * reverse_correlation(rho, basis));
}

DensityOperator classical_mixture(const CoherentLabel& a, const CoherentLabel& b, const SpinBasis& basis) {
  auto pa = coherent_state(a, basis).coeffs;
  auto pb = coherent_state(b, basis).coeffs;
  return {basis.id(), 0.5 * (pa * pa.adjoint() + pb * pb.adjoint())};
}

double distance(const CMat& rho, const CMat& sigma) {
  if (rho.rows() != sigma.rows() || rho.cols() != sigma.cols())
    throw InputError("distance: shape mismatch");
  return (rho - sigma).squaredNorm();
}

lindblad::Trajectory evolved_classical_reference(const CoherentLabel& a, const CoherentLabel& b,
                                                 const lindblad::DickeGenerator& gen,
                                                 const std::vector<double>& t_grid,
                                                 const lindblad::IntegratorOptions& opts) {
  SpinBasis basis(gen.j);
  auto rho = classical_mixture(a, b, basis);
  return lindblad::integrate(lindblad::make_generator(gen), rho.matrix, t_grid, opts);
}

}  // namespace decolab::spin
