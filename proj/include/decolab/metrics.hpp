#pragma once

#include <functional>
#include <string>
#include <vector>

#include "decolab/types.hpp"

namespace decolab::metrics {

struct DiagnosticSeries {
  std::vector<double> times, entropy, linear_entropy, purity, participation, energy;
};

struct DiagnosticOptions {
  bool entropy = true;        // von Neumann entropy needs a full eigensolve
  double eig_floor = -1e-7;   // below this the snapshot is rejected
};

// Accumulates one row per snapshot; usable as an integrator observer.
class DiagnosticAccumulator {
 public:
  // energy = Tr(rho diag(h))
  explicit DiagnosticAccumulator(RVec h, DiagnosticOptions opts = {});
  void add(double t, const CMat& rho);
  const DiagnosticSeries& series() const { return s_; }

 private:
  RVec h_;
  DiagnosticOptions opts_;
  DiagnosticSeries s_;
};

DiagnosticSeries diagnostics(const std::vector<double>& times, const std::vector<CMat>& states,
                             const RVec& h, const DiagnosticOptions& opts = {});

double von_neumann_entropy(const CMat& rho, double eig_floor = -1e-7);
double purity(const CMat& rho);

struct KneeReport {
  bool separated = false;  // false: slope ratio below the separation limit
  double t_d = 0;
  double slope_early = 0, slope_late = 0;
  double ratio = 0;  // |early| / |late|
  double residual = 0;
  std::string method = "two-segment-continuous-lsq";
};

// Continuous two-segment least-squares fit; the breakpoint minimizes the total
// squared residual. Needs at least 6 samples.
KneeReport detect_knee(const std::vector<double>& t, const std::vector<double>& y,
                       double min_ratio = 3.0);

// Exponential relaxation time of |y - asymptote| over t >= t_from (log-linear fit).
double relaxation_time(const std::vector<double>& t, const std::vector<double>& y, double t_from,
                       double asymptote, double t_to = 0);

struct SchmidtResult {
  std::vector<double> p;  // descending, sum 1
  CMat U, V;              // columns: Schmidt vectors on A and B
  double reconstruction_error = 0;
};

// psi indexed a*dB + b
SchmidtResult schmidt(const CVec& psi, int dA, int dB);
double participation(const std::vector<double>& p);

// A = sum_{k!=0,l!=0} |<phi_k Phi_l|V|phi_0 Phi_0>|^2 with product index a*dE + b.
// Columns of sys_basis / env_basis are the bases; column 0 is the initial state.
double entanglement_rate_generic(const CMat& V, const CMat& sys_basis, const CMat& env_basis);

using OverlapSchedule = std::function<CMat(double t)>;
// rho_nm(t) = c_n c_m^* f_nm(t)
std::vector<CMat> toy_dephasing(const CVec& c, const OverlapSchedule& f, const std::vector<double>& times);

void write_series_csv(const std::string& path, const DiagnosticSeries& s);
void write_knee_json(const std::string& path, const KneeReport& k);
std::string knee_json(const KneeReport& k);

}  // namespace decolab::metrics
