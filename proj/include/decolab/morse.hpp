#pragma once

#include <string>
#include <utility>
#include <vector>

#include "decolab/types.hpp"

namespace decolab::morse {

// H = P^2 + (s+1/2)^2 (exp(-2x) - 2 exp(-x)); time in units of t0 with
// d/dt |phi> = -i 2pi/(2s+1) H |phi>.
struct MorseParams {
  double s = 54.54;
  std::string label;

  int n_bound() const;
  double depth() const { return (s + 0.5) * (s + 0.5); }
  // 2pi/(2s+1): converts dimensionless energies to angular frequency in 1/t0
  double omega_scale() const;
  double potential(double x) const;
  double bound_energy(int n) const { return -(s - n) * (s - n); }
};

// Named molecule presets ("NO" -> s = 54.54).
MorseParams molecule(const std::string& name);

struct GridSpec {
  double x_min = -2.0;
  double x_max = 30.0;
  int points = 2048;

  double dx() const { return (x_max - x_min) / (points - 1); }
  double x(int i) const { return x_min + i * dx(); }
};

struct MorseBasis {
  MorseParams params;
  GridSpec grid;
  RMat eigenvectors;  // points x n_basis, sum_i |psi(x_i)|^2 dx = 1
  RVec energies;      // ascending
  int n_bound = 0;

  int size() const { return static_cast<int>(energies.size()); }
  std::string id() const;
};

MorseBasis build_basis(const MorseParams& params, const GridSpec& grid = {}, int n_basis = 150);

// Analytic bound eigenfunction, normalized on the real line.
double bound_wavefunction(int n, const MorseParams& params, double x);

struct PhasePoint {
  double x0 = 0;
  double p0 = 0;
};

// Label map <X> = ln Re w, <P> = s Im w / Re w with w = (1+beta)/(1-beta).
cplx beta_of(const PhasePoint& point, double s);
PhasePoint point_of(cplx beta, double s);
// Exact <X> of |beta> minus the label x0: ln(2s+1) - digamma(2s).
double label_offset(double s);

cplx coherent_wavefunction(cplx beta, const MorseParams& params, double x);

struct CoherentState {
  StateVector state;
  cplx beta;
  double captured_norm = 0;        // norm of the projection before renormalizing
  double dissociation_weight = 0;  // sum of |c_n|^2 over n >= n_bound
  bool dissociation_warning = false;
};

CoherentState coherent_state(const PhasePoint& point, const MorseBasis& basis,
                             double dissociation_threshold = 0.01);

// Bound-state coefficients <psi_n|beta> from the terminating hypergeometric sum.
CVec coherent_bound_closed_form(cplx beta, const MorseParams& params);

RMat position_matrix(const MorseBasis& basis);
// Spectral derivative on the periodic grid, projected on the basis.
CMat momentum_matrix(const MorseBasis& basis);

StateVector evolve_free(const StateVector& state, const MorseBasis& basis, double t);
StateVector evolve_free(const StateVector& state, const RVec& energies, double omega_scale,
                        double t);

struct Observables {
  RMat X;
  CMat P;
};
Observables observables(const MorseBasis& basis);

std::pair<double, double> expectation_xp(const StateVector& state, const Observables& ops);
std::pair<double, double> expectation_xp(const StateVector& state, const MorseBasis& basis);

// Wavefunction on the basis grid.
CVec wavefunction(const StateVector& state, const MorseBasis& basis);

struct BohrLine {
  double frequency;  // units of omega0 = 2pi/t0
  double weight;     // |c_n c_k^* X_kn|
  int order;         // |k - n|
};

std::vector<BohrLine> bohr_spectrum(const StateVector& state, const RVec& energies, const RMat& X,
                                    double s, double min_weight = 1e-14);
// Weight-averaged frequency of one family, and its total weight.
std::pair<double, double> family_centroid(const std::vector<BohrLine>& lines, int order);
std::vector<std::pair<double, double>> bin_spectrum(const std::vector<BohrLine>& lines,
                                                    double bin_width, double f_max);

// |<phi(0)|phi(t)>|^2
double autocorrelation(const StateVector& state, const RVec& energies, double omega_scale,
                       double t);

struct RevivalReport {
  double time;
  double autocorrelation;
};
RevivalReport find_revival(const StateVector& state, const RVec& energies, double omega_scale,
                           double t_lo, double t_hi);

// <X>(t) sampled on a uniform grid.
std::vector<double> position_signal(const StateVector& state, const RVec& energies, const RMat& X,
                                     double omega_scale, double t0, double dt, int count);

struct HarmonicProfile {
  std::vector<double> centers;
  std::vector<double> ratio;  // A(2w)/(A(w)+A(2w)) in a sliding window
  double peak_time = 0;  // middle of the half-maximum span around the peak
};
// Locates the epoch where <X> oscillates at twice the fundamental frequency.
HarmonicProfile second_harmonic_profile(const StateVector& state, const RVec& energies,
                                        const RMat& X, double s, double fundamental,
                                        double t_lo, double t_hi, double window);

void save_basis(const MorseBasis& basis, const std::string& json_path, const std::string& csv_path);
MorseBasis load_basis(const std::string& json_path, const std::string& csv_path);

}  // namespace decolab::morse
