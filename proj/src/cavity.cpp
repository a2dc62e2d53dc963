#include "decolab/cavity.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <iomanip>

#include <json.hpp>

namespace decolab::cavity {

namespace {

Block make_block(double j, int offset, double delta, double g, int n_max) {
  Block b;
  b.j = j;
  b.dim_atom = static_cast<int>(std::lround(2 * j)) + 1;
  b.offset = offset;
  const int nf = n_max + 1, d = b.dim_atom * nf;
  b.H = RMat::Zero(d, d);
  b.excitations.resize(d);
  for (int a = 0; a < b.dim_atom; ++a)
    for (int n = 0; n < nf; ++n) {
      int i = a * nf + n;
      b.H(i, i) = delta * n;
      b.excitations[i] = a + offset + n;
      // a J+ : (a, n) -> (a+1, n-1)
      if (a + 1 < b.dim_atom && n > 0) {
        double v = g * std::sqrt(static_cast<double>(n)) * std::sqrt((2 * j - a) * (a + 1));
        int k = (a + 1) * nf + (n - 1);
        b.H(k, i) = v;
        b.H(i, k) = v;
      }
    }
  Eigen::SelfAdjointEigenSolver<RMat> es(b.H);
  b.vectors = es.eigenvectors();
  b.energies = es.eigenvalues();
  return b;
}

CVec propagate(const Block& b, const CVec& psi, double t) {
  CVec w = b.vectors.transpose().cast<cplx>() * psi;
  for (Eigen::Index k = 0; k < w.size(); ++k) w[k] *= std::polar(1.0, -b.energies[k] * t);
  return b.vectors.cast<cplx>() * w;
}

void check_state(const CavitySystem& sys, const ProtocolState& s) {
  if (s.sym.size() != sys.sym.H.rows() || s.sub.size() != sys.sub.H.rows())
    throw InputError("cavity: state does not match the system blocks");
  if (s.photons < 0 || s.photons > sys.n_max) throw InputError("cavity: photon index out of range");
}

// Fast evaluation of the two rung amplitudes along the exact trajectory.
class RungTrack {
 public:
  RungTrack(const CavitySystem& sys, const ProtocolState& s) : sys_(sys), s_(s) {
    const int p = s.photons;
    ws_ = sys.sym.vectors.transpose().cast<cplx>() * s.sym;
    wb_ = sys.sub.vectors.transpose().cast<cplx>() * s.sub;
    rs_ = sys.sym.vectors.row(sys.index(1, p)).transpose();
    rb_ = sys.sub.vectors.row(sys.index(0, p)).transpose();
    norm2_ = s.sym.squaredNorm() + s.sub.squaredNorm();
  }

  double distance(double t) const {
    cplx A1 = 0, B0 = 0;
    for (Eigen::Index k = 0; k < ws_.size(); ++k) A1 += rs_[k] * ws_[k] * std::polar(1.0, -sys_.sym.energies[k] * t);
    for (Eigen::Index k = 0; k < wb_.size(); ++k) B0 += rb_[k] * wb_[k] * std::polar(1.0, -sys_.sub.energies[k] * t);
    return from_rung(A1, B0);
  }

  double from_rung(cplx A1, cplx B0) const {
    const double N = sys_.N;
    cplx c = A1 / std::sqrt(N) + B0 * std::sqrt((N - 1) / N);
    cplx d = A1 / std::sqrt(N) - B0 / std::sqrt(N * (N - 1));
    double ov = std::sqrt((N - 1) / N) * (std::abs(c) + std::abs(d));
    return std::sqrt(std::max(0.0, norm2_ + 1 - 2 * ov));
  }

 private:
  const CavitySystem& sys_;
  const ProtocolState& s_;
  CVec ws_, wb_;
  RVec rs_, rb_;
  double norm2_;
};

// Global minimum of f on a uniform scan of [0, window], refined by golden section.
TmResult scan_minimum(const std::function<double(double)>& f, double window, int samples) {
  if (samples < 3) throw InputError("find_tm_exact: need at least 3 scan points");
  const double dt = window / (samples - 1);
  int best = 1;
  double fb = INFINITY;
  for (int i = 1; i < samples; ++i) {
    double v = f(i * dt);
    if (v < fb) {
      fb = v;
      best = i;
    }
  }
  double lo = (best - 1) * dt, hi = std::min(window, (best + 1) * dt);
  const double gr = (std::sqrt(5.0) - 1) / 2;
  double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
  double f1 = f(x1), f2 = f(x2);
  while (hi - lo > 1e-6 * std::max(1e-300, 0.5 * (hi + lo))) {
    if (f1 < f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - gr * (hi - lo);
      f1 = f(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + gr * (hi - lo);
      f2 = f(x2);
    }
  }
  double t = 0.5 * (lo + hi), v = f(t);
  if (fb < v) return {best * dt, fb};
  return {t, v};
}

}  // namespace

CavitySystem build_system(int N, double delta_over_g, int n_max, double g) {
  if (N < 2) throw InputError("build_system: need N >= 2");
  if (n_max < 2) throw InputError("build_system: n_max must be at least 2");
  if (!std::isfinite(delta_over_g) || delta_over_g == 0) throw InputError("build_system: detuning must be nonzero");
  if (!(g >= 0)) throw InputError("build_system: coupling must be non-negative");
  CavitySystem s;
  s.N = N;
  s.g = g;
  s.delta = delta_over_g * (g > 0 ? g : 1);
  s.n_max = n_max;
  s.sym = make_block(N / 2.0, 0, s.delta, g, n_max);
  s.sub = make_block(N / 2.0 - 1, 1, s.delta, g, n_max);
  s.weak_coupling_warning = g * std::sqrt(static_cast<double>(N)) / std::fabs(s.delta) > 0.2;
  return s;
}

double excitation_commutator(const CavitySystem& sys) {
  double e = 0;
  for (const Block* b : {&sys.sym, &sys.sub}) {
    RMat C = b->H * b->excitations.asDiagonal() - b->excitations.asDiagonal() * b->H;
    e = std::max(e, C.cwiseAbs().maxCoeff());
  }
  return e;
}

namespace {

ProtocolState empty_state(const CavitySystem& sys, int n_photons) {
  if (n_photons < 0 || n_photons >= sys.n_max - 1)
    throw InputError("initial_state: photon truncation too small (need n_max >= photons + 2)");
  ProtocolState s;
  s.sym = CVec::Zero(sys.sym.H.rows());
  s.sub = CVec::Zero(sys.sub.H.rows());
  s.photons = n_photons;
  return s;
}

}  // namespace

ProtocolState initial_state(const CavitySystem& sys, int n_photons) {
  ProtocolState s = empty_state(sys, n_photons);
  const double N = sys.N;
  s.sym[sys.index(1, n_photons)] = 1 / std::sqrt(N);
  s.sub[sys.index(0, n_photons)] = std::sqrt((N - 1) / N);
  return s;
}

ProtocolState subradiant_state(const CavitySystem& sys, int n_photons) {
  ProtocolState s = empty_state(sys, n_photons);
  s.sub[sys.index(0, n_photons)] = 1;
  return s;
}

ProtocolState symmetric_state(const CavitySystem& sys, int n_photons) {
  ProtocolState s = empty_state(sys, n_photons);
  s.sym[sys.index(1, n_photons)] = 1;
  return s;
}

Prediction perturbative_prediction(int N, double delta_over_g, double g) {
  if (N < 2) throw InputError("perturbative_prediction: need N >= 2");
  if (delta_over_g == 0) throw InputError("perturbative_prediction: detuning must be nonzero");
  Prediction p;
  const double n = N;
  p.alpha = n * g / (2 * delta_over_g);
  p.t_m = std::asin(std::sqrt(n / (4 * n - 4))) / std::fabs(p.alpha);
  p.phi = std::acos((n - 2) / (2 * n - 2));
  return p;
}

ProtocolState evolve_exact(const CavitySystem& sys, const ProtocolState& s, double t) {
  check_state(sys, s);
  ProtocolState out = s;
  out.sym = propagate(sys.sym, s.sym, t);
  out.sub = propagate(sys.sub, s.sub, t);
  return out;
}

double energy(const CavitySystem& sys, const ProtocolState& s) {
  check_state(sys, s);
  cplx e = s.sym.dot(sys.sym.H.cast<cplx>() * s.sym) + s.sub.dot(sys.sub.H.cast<cplx>() * s.sub);
  return e.real();
}

ProductAmplitudes product_amplitudes(const CavitySystem& sys, const ProtocolState& s) {
  check_state(sys, s);
  const double N = sys.N;
  cplx A1 = s.sym[sys.index(1, s.photons)], B0 = s.sub[sys.index(0, s.photons)];
  return {A1 / std::sqrt(N) + B0 * std::sqrt((N - 1) / N), A1 / std::sqrt(N) - B0 / std::sqrt(N * (N - 1))};
}

double target_distance(const CavitySystem& sys, const ProtocolState& s) {
  check_state(sys, s);
  RungTrack r(sys, s);
  return r.from_rung(s.sym[sys.index(1, s.photons)], s.sub[sys.index(0, s.photons)]);
}

double target_phase(const CavitySystem& sys, const ProtocolState& s) {
  ProductAmplitudes p = product_amplitudes(sys, s);
  return std::arg(p.control / (-p.other));
}

TmResult find_tm_exact(const CavitySystem& sys, const ProtocolState& s, double window, int samples) {
  check_state(sys, s);
  Prediction pred = perturbative_prediction(sys.N, sys.delta / (sys.g > 0 ? sys.g : 1), sys.g > 0 ? sys.g : 1);
  if (!(window >= 1.5 * pred.t_m))
    throw InputError("find_tm_exact: scan window shorter than 1.5 perturbative t_m");
  RungTrack r(sys, s);
  return scan_minimum([&](double t) { return r.distance(t); }, window, samples);
}

ProtocolState phase_kick(const CavitySystem& sys, const ProtocolState& s, double phi) {
  check_state(sys, s);
  ProtocolState out = s;
  const double N = sys.N;
  const double u1 = 1 / std::sqrt(N), u2 = std::sqrt((N - 1) / N);
  const cplx f = std::polar(1.0, phi) - 1.0;
  const int nf = sys.n_max + 1;
  for (int n = 0; n < nf; ++n) {
    cplx& A1 = out.sym[sys.index(1, n)];
    cplx& B0 = out.sub[sys.index(0, n)];
    cplx proj = u1 * A1 + u2 * B0;
    A1 += f * u1 * proj;
    B0 += f * u2 * proj;
  }
  if (phi != 0) {
    double lost = 0;
    for (int a = 2; a < sys.sym.dim_atom; ++a)
      for (int n = 0; n < nf; ++n) {
        lost += std::norm(out.sym[sys.index(a, n)]);
        out.sym[sys.index(a, n)] = 0;
      }
    for (int a = 1; a < sys.sub.dim_atom; ++a)
      for (int n = 0; n < nf; ++n) {
        lost += std::norm(out.sub[sys.index(a, n)]);
        out.sub[sys.index(a, n)] = 0;
      }
    out.leaked_norm += lost;
  }
  return out;
}

double fidelity_subradiant(const CavitySystem& sys, const ProtocolState& s) {
  check_state(sys, s);
  return std::norm(s.sub[sys.index(0, s.photons)]);
}

SubradianceReport subradiance_check(const CavitySystem& sys, const ProtocolState& s, double horizon, int samples) {
  check_state(sys, s);
  if (!(horizon > 0) || samples < 2) throw InputError("subradiance_check: need a positive horizon and 2+ samples");
  SubradianceReport r;
  const double gd = sys.g / sys.delta;
  r.bound = 1 - 10 * gd * gd * sys.N;
  const int p = s.photons;
  CVec wb = sys.sub.vectors.transpose().cast<cplx>() * s.sub;
  RVec row = sys.sub.vectors.row(sys.index(0, p)).transpose();
  for (int i = 0; i < samples; ++i) {
    double t = horizon * i / (samples - 1);
    cplx amp = 0;
    for (Eigen::Index k = 0; k < wb.size(); ++k) amp += row[k] * wb[k] * std::polar(1.0, -sys.sub.energies[k] * t);
    double f = std::norm(amp);
    r.times.push_back(t);
    r.fidelity.push_back(f);
    r.min_fidelity = std::min(r.min_fidelity, f);
  }
  r.within_bound = r.min_fidelity >= r.bound;
  return r;
}

double dressed_gap(const CavitySystem& sys, int n_photons) {
  if (n_photons < 0 || n_photons > sys.n_max - 1) throw InputError("dressed_gap: photon index out of range");
  Eigen::Index ka, kb;
  sys.sym.vectors.row(sys.index(1, n_photons)).cwiseAbs().maxCoeff(&ka);
  sys.sub.vectors.row(sys.index(0, n_photons)).cwiseAbs().maxCoeff(&kb);
  return sys.sub.energies[kb] - sys.sym.energies[ka];
}

FieldIndependenceReport field_independence_test(const CavitySystem& sys, const std::vector<cplx>& c_n,
                                                double window) {
  double total = 0;
  for (const cplx& c : c_n) total += std::norm(c);
  if (std::fabs(total - 1) > 1e-10) throw InputError("field_independence_test: photon distribution not normalized");
  for (std::size_t n = 0; n < c_n.size(); ++n)
    if (std::norm(c_n[n]) > 0 && static_cast<int>(n) >= sys.n_max - 1)
      throw InputError("field_independence_test: photon distribution exceeds the truncation");
  const double gg = sys.g > 0 ? sys.g : 1;
  if (window <= 0) window = 2 * perturbative_prediction(sys.N, sys.delta / gg, gg).t_m;

  FieldIndependenceReport rep;
  std::vector<ProtocolState> states;
  for (std::size_t n = 0; n < c_n.size(); ++n) {
    double w = std::norm(c_n[n]);
    if (w == 0) continue;
    ProtocolState s = initial_state(sys, static_cast<int>(n));
    TmResult tm = find_tm_exact(sys, s, window);
    rep.sectors.push_back({static_cast<int>(n), w, tm.t_m, tm.min_distance, 0.5 * dressed_gap(sys, static_cast<int>(n))});
    states.push_back(s);
  }
  std::vector<RungTrack> tracks;
  tracks.reserve(states.size());
  for (const auto& s : states) tracks.emplace_back(sys, s);
  auto mixed = [&](double t) {
    double v = 0;
    for (std::size_t i = 0; i < tracks.size(); ++i) {
      double d = tracks[i].distance(t);
      v += rep.sectors[i].weight * d * d;
    }
    return v;
  };
  rep.t_m_mixture = scan_minimum(mixed, window, 2000).t_m;
  double amin = INFINITY, amax = -INFINITY, amean = 0;
  for (const auto& sec : rep.sectors) {
    rep.t_m_spread = std::max(rep.t_m_spread, std::fabs(sec.t_m - rep.t_m_mixture) / rep.t_m_mixture);
    amin = std::min(amin, sec.alpha_eff);
    amax = std::max(amax, sec.alpha_eff);
    amean += sec.weight * sec.alpha_eff;
  }
  rep.alpha_spread = (amax - amin) / std::fabs(amean);
  return rep;
}

ProtocolReport run_protocol(int N, double delta_over_g, int n_photons, int n_max) {
  if (n_max <= 0) n_max = n_photons + 2;
  CavitySystem sys = build_system(N, delta_over_g, n_max);
  Prediction pred = perturbative_prediction(N, delta_over_g);
  ProtocolState s0 = initial_state(sys, n_photons);
  TmResult tm = find_tm_exact(sys, s0, 2 * pred.t_m);
  ProtocolState at = evolve_exact(sys, s0, tm.t_m);
  ProtocolState kicked = phase_kick(sys, at, -pred.phi);

  ProtocolReport r;
  r.N = N;
  r.delta_over_g = delta_over_g;
  r.t_m_pert = pred.t_m;
  r.t_m_exact = tm.t_m;
  r.min_distance = tm.min_distance;
  r.phi_pert = pred.phi;
  r.phi_exact = target_phase(sys, at);
  r.fidelity_post_kick = fidelity_subradiant(sys, kicked);
  r.leaked_norm = kicked.leaked_norm;
  r.weak_coupling_warning = sys.weak_coupling_warning;
  return r;
}

std::string report_json(const ProtocolReport& r) {
  nlohmann::ordered_json j;
  j["N"] = r.N;
  j["delta_over_g"] = r.delta_over_g;
  j["t_m_pert"] = r.t_m_pert;
  j["t_m_exact"] = r.t_m_exact;
  j["min_distance"] = r.min_distance;
  j["phi_pert"] = r.phi_pert;
  j["phi_exact"] = r.phi_exact;
  j["fidelity_post_kick"] = r.fidelity_post_kick;
  j["leaked_norm"] = r.leaked_norm;
  j["weak_coupling_warning"] = r.weak_coupling_warning;
  j["time_unit"] = "1/g";
  return j.dump(2);
}

void write_report_json(const std::string& path, const ProtocolReport& r) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path);
  out << report_json(r) << "\n";
}

void write_sweep_csv(const std::string& path, const std::vector<ProtocolReport>& rows) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path);
  out << std::setprecision(12) << "N,delta_over_g,t_m_pert,t_m_exact,min_distance,fidelity_post_kick,leaked_norm\n";
  for (const auto& r : rows)
    out << r.N << "," << r.delta_over_g << "," << r.t_m_pert << "," << r.t_m_exact << "," << r.min_distance << ","
        << r.fidelity_post_kick << "," << r.leaked_norm << "\n";
}

}  // namespace decolab::cavity
