#pragma once

#include <string>
#include <vector>

#include "decolab/types.hpp"

namespace decolab::cavity {

// One angular-momentum ladder j tensored with Fock space 0..n_max.
// Index a*(n_max+1) + n, a = m + j.
struct Block {
  double j = 0;
  int dim_atom = 0;
  int offset = 0;    // atomic excitations of a = 0 (m + N/2 at m = -j)
  RMat H;            // frame rotating at omega_a: Delta a^dag a + g(a^dag J- + a J+)
  RMat vectors;      // eigenvectors of H
  RVec energies;
  RVec excitations;  // a + offset + n
};

struct CavitySystem {
  int N = 2;
  double delta = 30;  // detuning in units of g
  double g = 1;
  int n_max = 3;
  Block sym, sub;  // j = N/2 and j = N/2 - 1
  bool weak_coupling_warning = false;  // g sqrt(N)/Delta > 0.2

  int index(int a, int n) const { return a * (n_max + 1) + n; }
};

CavitySystem build_system(int N, double delta_over_g, int n_max, double g = 1);

// max |[H, Jz + a^dag a]| over both blocks
double excitation_commutator(const CavitySystem& sys);

struct ProtocolState {
  CVec sym, sub;
  double leaked_norm = 0;
  int photons = 0;  // Fock index n-1 of the single-excitation rung

  double norm() const { return std::sqrt(sym.squaredNorm() + sub.squaredNorm()); }
};

// |100...0> (x) |n_photons>, split as 1/sqrt(N)|1> + sqrt((N-1)/N)|2>
ProtocolState initial_state(const CavitySystem& sys, int n_photons);
// |2> (x) |n_photons>
ProtocolState subradiant_state(const CavitySystem& sys, int n_photons);
// |1> (x) |n_photons>
ProtocolState symmetric_state(const CavitySystem& sys, int n_photons);

struct Prediction {
  double alpha = 0;  // N g^2 / (2 Delta)
  double t_m = 0;    // smallest positive root of sin(alpha t) = sqrt(N/(4N-4))
  double phi = 0;    // acos((N-2)/(2N-2))
};

Prediction perturbative_prediction(int N, double delta_over_g, double g = 1);

ProtocolState evolve_exact(const CavitySystem& sys, const ProtocolState& s, double t);
double energy(const CavitySystem& sys, const ProtocolState& s);

// Amplitudes on |100...0>|n> and on each |0..1_k..0>|n> (k >= 2) of the rung.
struct ProductAmplitudes {
  cplx control, other;
};
ProductAmplitudes product_amplitudes(const CavitySystem& sys, const ProtocolState& s);

// Norm distance to (N-1)e^{i phi}|100..0> - sum_k |0..1_k..0>, normalized, with
// phi and the global phase chosen optimally.
double target_distance(const CavitySystem& sys, const ProtocolState& s);
// The optimal phi at this state.
double target_phase(const CavitySystem& sys, const ProtocolState& s);

struct TmResult {
  double t_m = 0;
  double min_distance = 0;
};

// Coarse scan of `samples` points over [0, window] then golden section.
TmResult find_tm_exact(const CavitySystem& sys, const ProtocolState& s, double window, int samples = 2000);

// e^{i phi} on the control-atom excitation within the single-excitation rung.
// Multi-excitation rungs cannot be kicked inside the two blocks; their
// amplitude is removed and its norm added to leaked_norm.
ProtocolState phase_kick(const CavitySystem& sys, const ProtocolState& s, double phi);

double fidelity_subradiant(const CavitySystem& sys, const ProtocolState& s);

struct SubradianceReport {
  std::vector<double> times, fidelity;
  double min_fidelity = 1;
  double bound = 0;  // 1 - 10 (g/Delta)^2 N
  bool within_bound = true;
};

SubradianceReport subradiance_check(const CavitySystem& sys, const ProtocolState& s, double horizon,
                                    int samples = 400);

// Gap between the dressed |2>-like and |1>-like levels of the rung.
double dressed_gap(const CavitySystem& sys, int n_photons);

struct SectorResult {
  int photons = 0;
  double weight = 0;
  double t_m = 0;
  double min_distance = 0;
  double alpha_eff = 0;  // half the dressed gap
};

struct FieldIndependenceReport {
  std::vector<SectorResult> sectors;
  double t_m_mixture = 0;  // minimizer of sum_n |c_n|^2 d_n(t)^2
  double t_m_spread = 0;   // max relative deviation of sector t_m from the weighted mean
  double alpha_spread = 0;
};

FieldIndependenceReport field_independence_test(const CavitySystem& sys, const std::vector<cplx>& c_n,
                                                double window = 0);

struct ProtocolReport {
  int N = 0;
  double delta_over_g = 0;
  double t_m_pert = 0, t_m_exact = 0, min_distance = 0;
  double phi_pert = 0, phi_exact = 0;
  double fidelity_post_kick = 0;
  double leaked_norm = 0;
  bool weak_coupling_warning = false;
};

ProtocolReport run_protocol(int N, double delta_over_g, int n_photons = 0, int n_max = 0);

std::string report_json(const ProtocolReport& r);
void write_report_json(const std::string& path, const ProtocolReport& r);
void write_sweep_csv(const std::string& path, const std::vector<ProtocolReport>& rows);

}  // namespace decolab::cavity
