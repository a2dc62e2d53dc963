#pragma once

#include <functional>
#include <string>
#include <vector>

#include "decolab/types.hpp"

namespace decolab::lindblad {

// Temperature in units of hbar*omega01/k.
struct BathSpec {
  double temperature = 0;
  double lambda = 1;
  int spectral_exponent = 3;
};

// Mean photon number for a transition of energy `omega` when the reference
// quantum `omega01` corresponds to temperature T.
double mean_occupation(double omega, double omega01, double temperature);

// Multilevel system coupled through X to a bath with omega^3 spectral density.
// L is the strictly upper (lowering) part of X, R = L^T the raising part;
// Le = emission-weighted lowering, Ra = absorption-weighted raising.
struct AnharmonicGenerator {
  RVec energies;
  RMat X, L, R, Le, Ra;
  RMat gamma;  // gamma(i,k): rate of k -> i
  double omega_scale = 1;
  BathSpec bath;
  // cached complex forms used by the right-hand side
  CMat anti;  // R Le + L Ra
  CMat Lc, Rc, Lec, Rac;
};

AnharmonicGenerator build_anharmonic_generator(const RVec& energies, const RMat& X,
                                               const BathSpec& bath, double omega_scale);

// lambda giving omega01 / gamma01 = ratio at T = 0, with omega01 = omega_scale (E1 - E0)
// and gamma01 the 1 -> 0 rate.
double calibrate_lambda(const RVec& energies, const RMat& X, double omega_scale, double ratio);

CMat rhs_full(const AnharmonicGenerator& gen, const CMat& rho);
CMat rhs_secular(const AnharmonicGenerator& gen, const CMat& rho);
RVec pauli_rhs(const RMat& gamma, const RVec& populations);
// Stationary populations of the rate equations.
RVec pauli_stationary(const RMat& gamma);
RVec boltzmann(const RVec& energies, double temperature);

struct DickeGenerator {
  double j = 0.5;
  double gamma = 1;
  double n_bar = 0;
  RMat Jp, Jm;
  RVec cm;  // cm[a] = <a-1|J-|a>, cm[0] = 0, with a = m + j
};

DickeGenerator build_dicke_generator(double j, double gamma, double n_bar);
CMat dicke_rhs(const DickeGenerator& gen, const CMat& rho);
void dicke_rhs(const DickeGenerator& gen, const CMat& rho, CMat& out);

enum class PresetKind { amplitude_damping, phase_relaxation };
PresetKind preset_kind(const std::string& name);

struct HarmonicPreset {
  PresetKind kind;
  int dim;
  double gamma;
  double n_bar;
  double frequency = 0;  // optional H = frequency * a^dagger a
  RMat a;                // truncated annihilation operator
};

HarmonicPreset preset(const std::string& name, int dim, double gamma, double n_bar,
                      double frequency = 0);
CMat preset_rhs(const HarmonicPreset& p, const CMat& rho);

// Time-independent generator split as -i[diag(frame), rho] + dissipator(rho).
// The frame part is integrated exactly (interaction picture).
struct Generator {
  int dim = 0;
  RVec frame;  // may be empty
  std::function<void(const CMat&, CMat&)> dissipator;
};

enum class AnharmonicMode { full, secular };
Generator make_generator(const AnharmonicGenerator& gen, AnharmonicMode mode = AnharmonicMode::full);
Generator make_generator(const DickeGenerator& gen);
Generator make_generator(const HarmonicPreset& p);
Generator zero_generator(int dim);

struct IntegratorOptions {
  double tol = 1e-9;
  double h_init = 0;  // 0: automatic
  double h_max = 0;   // 0: unlimited
  long max_steps = 50'000'000;
  bool validate = true;
  double herm_tol = 1e-8;
  double trace_tol = 1e-8;
  double eig_floor = -1e-7;
};

struct IntegratorStats {
  long steps = 0;
  long rejected = 0;
  long rhs_evals = 0;
};

using Observer = std::function<void(double t, const CMat& rho)>;

// Adaptive Dormand-Prince 5(4) with dense output at t_grid. rho is
// Hermitized after each accepted step; every emitted snapshot is validated.
IntegratorStats integrate(const Generator& gen, const CMat& rho0, const std::vector<double>& t_grid,
                          const IntegratorOptions& opts, const Observer& observer);

struct Trajectory {
  std::vector<double> times;
  std::vector<CMat> states;
  IntegratorStats stats;
};

Trajectory integrate(const Generator& gen, const CMat& rho0, const std::vector<double>& t_grid,
                     const IntegratorOptions& opts = {});

// CSV with column t followed by the named observables.
void write_trajectory_csv(const std::string& path, const std::vector<double>& times,
                          const std::vector<std::string>& names,
                          const std::vector<std::vector<double>>& columns);
// Snapshot matrix file: header line "dim,<d>" then rows "i,j,re,im".
void write_snapshot(const std::string& path, const CMat& rho);
CMat read_snapshot(const std::string& path);

}  // namespace decolab::lindblad
