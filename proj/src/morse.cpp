#include "decolab/morse.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <sstream>

#include <unsupported/Eigen/FFT>

#include "decolab/special.hpp"
#include "json.hpp"

namespace decolab::morse {

using std::numbers::pi;

int MorseParams::n_bound() const { return static_cast<int>(std::floor(s)) + 1; }

double MorseParams::omega_scale() const { return 2 * pi / (2 * s + 1); }

double MorseParams::potential(double x) const {
  double e = std::exp(-x);
  return depth() * (e * e - 2 * e);
}

MorseParams molecule(const std::string& name) {
  if (name == "NO") return {54.54, "NO"};
  throw InputError("unknown molecule preset: " + name);
}

std::string MorseBasis::id() const {
  std::ostringstream os;
  os << "morse(s=" << params.s << ",x=[" << grid.x_min << "," << grid.x_max << "],M=" << grid.points
     << ",n=" << energies.size() << ")";
  return os.str();
}

double bound_wavefunction(int n, const MorseParams& p, double x) {
  if (n < 0 || n >= p.n_bound()) throw InputError("bound_wavefunction: n outside bound range");
  const double s = p.s;
  const double alpha = 2 * s - 2 * n;
  const double y = (2 * s + 1) * std::exp(-x);
  const double log_norm =
      0.5 * (std::lgamma(n + 1.0) + std::log(alpha) - std::lgamma(2 * s - n + 1));
  auto lag = special::laguerre(n, alpha, y);
  if (lag.sign == 0) return 0.0;
  double v = log_norm + (s - n) * std::log(y) - 0.5 * y + lag.log_abs;
  return lag.sign * std::exp(v);
}

namespace {

void check_edges(const MorseParams& p, const GridSpec& g) {
  const double tol = 1e-12;
  double a = std::fabs(bound_wavefunction(0, p, g.x_min));
  double b = std::fabs(bound_wavefunction(0, p, g.x_max));
  if (!(a < tol && b < tol)) {
    std::ostringstream os;
    os << "grid too small: ground-state amplitude at edges " << a << ", " << b;
    throw InputError(os.str());
  }
}

}  // namespace

MorseBasis build_basis(const MorseParams& params, const GridSpec& grid, int n_basis) {
  if (params.s <= 1) throw InputError("build_basis: s must exceed 1");
  if (grid.points < 4 || !(grid.x_max > grid.x_min)) throw InputError("build_basis: bad grid");
  if (n_basis > grid.points) throw InputError("build_basis: n_basis exceeds grid size");
  if (n_basis < params.n_bound()) throw InputError("build_basis: n_basis below bound-state count");
  check_edges(params, grid);

  const int M = grid.points;
  const double dx = grid.dx();
  // sinc-DVR kinetic energy for P^2 plus the diagonal potential, column major
  std::vector<double> h(static_cast<std::size_t>(M) * M);
  const double k0 = 1.0 / (dx * dx);
  for (int j = 0; j < M; ++j) {
    for (int i = j; i < M; ++i) {
      int d = i - j;
      double v = d == 0 ? k0 * pi * pi / 3 + params.potential(grid.x(i))
                        : k0 * 2.0 / (double(d) * d) * ((d & 1) ? -1.0 : 1.0);
      h[static_cast<std::size_t>(j) * M + i] = v;
    }
  }
  std::vector<double> w(M);
  std::vector<double> z(static_cast<std::size_t>(M) * n_basis);
  std::vector<lapack_int> isuppz(2 * n_basis);
  lapack_int found = 0;
  lapack_int info = LAPACKE_dsyevr(LAPACK_COL_MAJOR, 'V', 'I', 'L', M, h.data(), M, 0.0, 0.0, 1,
                                   n_basis, 0.0, &found, w.data(), z.data(), M, isuppz.data());
  if (info != 0 || found != n_basis) throw NumericalError("build_basis: eigensolver failed");

  MorseBasis b;
  b.params = params;
  b.grid = grid;
  b.energies = Eigen::Map<RVec>(w.data(), n_basis);
  b.eigenvectors = Eigen::Map<RMat>(z.data(), M, n_basis) / std::sqrt(dx);
  b.n_bound = 0;
  while (b.n_bound < n_basis && b.energies[b.n_bound] < 0) ++b.n_bound;

  // Fix signs: bound states follow the analytic convention, the rest have a
  // positive largest component.
  RVec ref(M);
  for (int n = 0; n < n_basis; ++n) {
    double sgn;
    if (n < b.n_bound && n < params.n_bound()) {
      for (int i = 0; i < M; ++i) ref[i] = bound_wavefunction(n, params, grid.x(i));
      sgn = b.eigenvectors.col(n).dot(ref) >= 0 ? 1 : -1;
    } else {
      Eigen::Index imax;
      b.eigenvectors.col(n).cwiseAbs().maxCoeff(&imax);
      sgn = b.eigenvectors(imax, n) >= 0 ? 1 : -1;
    }
    if (sgn < 0) b.eigenvectors.col(n) *= -1;
  }
  return b;
}

cplx beta_of(const PhasePoint& pt, double s) {
  const double re = std::exp(pt.x0);
  const cplx w(re, re * pt.p0 / s);
  return (w - 1.0) / (w + 1.0);
}

PhasePoint point_of(cplx beta, double s) {
  cplx w = (1.0 + beta) / (1.0 - beta);
  return {std::log(w.real()), s * w.imag() / w.real()};
}

double label_offset(double s) { return std::log(2 * s + 1) - special::digamma(2 * s); }

cplx coherent_wavefunction(cplx beta, const MorseParams& p, double x) {
  const double s = p.s;
  const double b2 = std::norm(beta);
  if (b2 >= 1) throw InputError("coherent state parameter outside the unit disk");
  const double y = (2 * s + 1) * std::exp(-x);
  const cplx w = (1.0 + beta) / (1.0 - beta);
  cplx lv = s * std::log1p(-b2) - 0.5 * std::lgamma(2 * s) - 2 * s * std::log(1.0 - beta) +
            s * std::log(y) - 0.5 * y * w;
  return std::exp(lv);
}

CVec coherent_bound_closed_form(cplx beta, const MorseParams& p) {
  const double s = p.s;
  const int nb = p.n_bound();
  const double b2 = std::norm(beta);
  if (b2 >= 1) throw InputError("coherent state parameter outside the unit disk");
  CVec c(nb);
  const cplx log1mb = std::log(1.0 - beta);
  for (int n = 0; n < nb; ++n) {
    double lr = 0.5 * (std::log(2 * s - 2 * n) + std::lgamma(2 * s - n + 1) - std::lgamma(n + 1.0) -
                       std::lgamma(2 * s)) +
                std::lgamma(2 * s - n) - std::lgamma(2 * s - 2 * n + 1) + s * std::log1p(-b2);
    cplx f = special::hyp2f1_terminating(n, 2 * s - n, 2 * s - 2 * n + 1, 1.0 - beta);
    c[n] = std::exp(cplx(lr, 0) - double(n) * log1mb) * f;
  }
  return c;
}

CoherentState coherent_state(const PhasePoint& point, const MorseBasis& basis, double threshold) {
  const auto& g = basis.grid;
  CoherentState out;
  out.beta = beta_of(point, basis.params.s);
  CVec phi(g.points);
  for (int i = 0; i < g.points; ++i) phi[i] = coherent_wavefunction(out.beta, basis.params, g.x(i));
  CVec c = basis.eigenvectors.transpose().cast<cplx>() * phi * g.dx();
  out.captured_norm = c.norm();
  c /= out.captured_norm;
  out.dissociation_weight = c.tail(basis.size() - basis.n_bound).squaredNorm();
  out.dissociation_warning = out.dissociation_weight > threshold;
  out.state = {basis.id(), c};
  return out;
}

RMat position_matrix(const MorseBasis& basis) {
  const auto& g = basis.grid;
  RVec x(g.points);
  for (int i = 0; i < g.points; ++i) x[i] = g.x(i);
  RMat X = basis.eigenvectors.transpose() * (x.asDiagonal() * basis.eigenvectors) * g.dx();
  return 0.5 * (X + X.transpose());
}

CMat momentum_matrix(const MorseBasis& basis) {
  const auto& g = basis.grid;
  const int M = g.points;
  const int nb = basis.size();
  Eigen::FFT<double> fft;
  std::vector<cplx> in(M), spec(M), back(M);
  RMat deriv(M, nb);
  const double L = M * g.dx();
  for (int n = 0; n < nb; ++n) {
    for (int i = 0; i < M; ++i) in[i] = basis.eigenvectors(i, n);
    fft.fwd(spec, in);
    for (int j = 0; j < M; ++j) {
      int kj = j < M / 2 ? j : j - M;
      if (2 * j == M) kj = 0;
      spec[j] *= cplx(0, 2 * pi * kj / L);
    }
    fft.inv(back, spec);
    for (int i = 0; i < M; ++i) deriv(i, n) = back[i].real();
  }
  RMat D = basis.eigenvectors.transpose() * deriv * g.dx();
  D = 0.5 * (D - D.transpose());
  return cplx(0, -1) * D.cast<cplx>();
}

StateVector evolve_free(const StateVector& state, const RVec& energies, double omega_scale,
                        double t) {
  if (state.coeffs.size() != energies.size()) throw InputError("evolve_free: basis mismatch");
  StateVector out = state;
  for (Eigen::Index n = 0; n < energies.size(); ++n)
    out.coeffs[n] *= std::polar(1.0, -omega_scale * energies[n] * t);
  return out;
}

StateVector evolve_free(const StateVector& state, const MorseBasis& basis, double t) {
  if (state.basis_id != basis.id()) throw InputError("evolve_free: basis mismatch");
  return evolve_free(state, basis.energies, basis.params.omega_scale(), t);
}

Observables observables(const MorseBasis& basis) { return {position_matrix(basis), momentum_matrix(basis)}; }

std::pair<double, double> expectation_xp(const StateVector& state, const Observables& ops) {
  const CVec& c = state.coeffs;
  double x = (c.adjoint() * (ops.X.cast<cplx>() * c))(0).real();
  double p = (c.adjoint() * (ops.P * c))(0).real();
  return {x, p};
}

std::pair<double, double> expectation_xp(const StateVector& state, const MorseBasis& basis) {
  return expectation_xp(state, observables(basis));
}

CVec wavefunction(const StateVector& state, const MorseBasis& basis) {
  return basis.eigenvectors.cast<cplx>() * state.coeffs;
}

std::vector<BohrLine> bohr_spectrum(const StateVector& state, const RVec& energies, const RMat& X,
                                    double s, double min_weight) {
  const CVec& c = state.coeffs;
  const Eigen::Index d = c.size();
  if (X.rows() != d || energies.size() != d) throw InputError("bohr_spectrum: shape mismatch");
  std::vector<BohrLine> lines;
  double diag = 0;
  for (Eigen::Index n = 0; n < d; ++n) diag += std::norm(c[n]) * std::fabs(X(n, n));
  if (diag > min_weight) lines.push_back({0.0, diag, 0});
  for (Eigen::Index n = 0; n < d; ++n) {
    if (std::abs(c[n]) == 0) continue;
    for (Eigen::Index k = n + 1; k < d; ++k) {
      double wgt = 2 * std::abs(c[n] * std::conj(c[k]) * X(k, n));
      if (wgt <= min_weight) continue;
      lines.push_back({(energies[k] - energies[n]) / (2 * s + 1), wgt, static_cast<int>(k - n)});
    }
  }
  return lines;
}

std::pair<double, double> family_centroid(const std::vector<BohrLine>& lines, int order) {
  double w = 0, wf = 0;
  for (const auto& l : lines)
    if (l.order == order) {
      w += l.weight;
      wf += l.weight * l.frequency;
    }
  return {w > 0 ? wf / w : 0.0, w};
}

std::vector<std::pair<double, double>> bin_spectrum(const std::vector<BohrLine>& lines,
                                                    double bin_width, double f_max) {
  const int nbins = static_cast<int>(std::ceil(f_max / bin_width));
  std::vector<std::pair<double, double>> bins(nbins);
  for (int i = 0; i < nbins; ++i) bins[i] = {(i + 0.5) * bin_width, 0.0};
  for (const auto& l : lines) {
    int i = static_cast<int>(l.frequency / bin_width);
    if (i >= 0 && i < nbins) bins[i].second += l.weight;
  }
  return bins;
}

double autocorrelation(const StateVector& state, const RVec& energies, double omega_scale,
                       double t) {
  cplx a = 0;
  for (Eigen::Index n = 0; n < energies.size(); ++n)
    a += std::norm(state.coeffs[n]) * std::polar(1.0, -omega_scale * energies[n] * t);
  return std::norm(a);
}

RevivalReport find_revival(const StateVector& state, const RVec& energies, double omega_scale,
                           double t_lo, double t_hi) {
  const double dt = 0.005;
  double best_t = t_lo, best = -1;
  for (double t = t_lo; t <= t_hi; t += dt) {
    double a = autocorrelation(state, energies, omega_scale, t);
    if (a > best) {
      best = a;
      best_t = t;
    }
  }
  // golden-section polish
  double a = best_t - dt, b = best_t + dt;
  const double gr = (std::sqrt(5.0) - 1) / 2;
  double c = b - gr * (b - a), d = a + gr * (b - a);
  auto f = [&](double t) { return -autocorrelation(state, energies, omega_scale, t); };
  double fc = f(c), fd = f(d);
  for (int it = 0; it < 60; ++it) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - gr * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + gr * (b - a);
      fd = f(d);
    }
  }
  double t = 0.5 * (a + b);
  return {t, autocorrelation(state, energies, omega_scale, t)};
}

std::vector<double> position_signal(const StateVector& state, const RVec& energies, const RMat& X,
                                    double omega_scale, double t0, double dt, int count) {
  const CVec& c = state.coeffs;
  const Eigen::Index d = c.size();
  double mean = 0;
  for (Eigen::Index n = 0; n < d; ++n) mean += std::norm(c[n]) * X(n, n);
  std::vector<cplx> amp, phase, step;
  for (Eigen::Index n = 0; n < d; ++n)
    for (Eigen::Index k = n + 1; k < d; ++k) {
      cplx a = 2.0 * std::conj(c[k]) * c[n] * X(k, n);
      if (std::abs(a) < 1e-15) continue;
      double w = omega_scale * (energies[k] - energies[n]);
      amp.push_back(a);
      phase.push_back(std::polar(1.0, w * t0));
      step.push_back(std::polar(1.0, w * dt));
    }
  std::vector<double> out(count);
  for (int i = 0; i < count; ++i) {
    double v = mean;
    for (std::size_t l = 0; l < amp.size(); ++l) {
      v += (amp[l] * phase[l]).real();
      phase[l] *= step[l];
    }
    // re-anchor phasors now and then to stop rounding drift
    if ((i + 1) % 512 == 0) {
      double t = t0 + (i + 1) * dt;
      std::size_t l = 0;
      for (Eigen::Index n = 0; n < d; ++n)
        for (Eigen::Index k = n + 1; k < d; ++k) {
          cplx a = 2.0 * std::conj(c[k]) * c[n] * X(k, n);
          if (std::abs(a) < 1e-15) continue;
          phase[l++] = std::polar(1.0, omega_scale * (energies[k] - energies[n]) * t);
        }
    }
    out[i] = v;
  }
  return out;
}

HarmonicProfile second_harmonic_profile(const StateVector& state, const RVec& energies,
                                        const RMat& X, double s, double fundamental, double t_lo,
                                        double t_hi, double window) {
  const double dt = 0.01;
  const double start = std::max(0.0, t_lo - window);
  const int count = static_cast<int>((t_hi + window - start) / dt) + 1;
  const double scale = 2 * pi / (2 * s + 1);
  auto sig = position_signal(state, energies, X, scale, start, dt, count);
  const double w1 = 2 * pi * fundamental;
  const int half = static_cast<int>(window / (2 * dt));
  HarmonicProfile prof;
  double best = -1;
  std::size_t ib = 0;
  for (double tc = t_lo; tc <= t_hi + 1e-12; tc += 0.05) {
    int ic = static_cast<int>(std::lround((tc - start) / dt));
    cplx a1 = 0, a2 = 0;
    double mean = 0, wsum = 0;
    for (int i = ic - half; i <= ic + half; ++i) {
      double h = 0.5 * (1 + std::cos(pi * (i - ic) / half));
      mean += h * sig[i];
      wsum += h;
    }
    mean /= wsum;
    for (int i = ic - half; i <= ic + half; ++i) {
      double h = 0.5 * (1 + std::cos(pi * (i - ic) / half));
      double t = start + i * dt;
      double v = h * (sig[i] - mean);
      a1 += v * std::polar(1.0, -w1 * t);
      a2 += v * std::polar(1.0, -2 * w1 * t);
    }
    double r = std::abs(a2) / (std::abs(a1) + std::abs(a2));
    prof.centers.push_back(tc);
    prof.ratio.push_back(r);
    if (r > best) {
      best = r;
      ib = prof.ratio.size() - 1;
    }
  }
  // the profile is a flat plateau; take the middle of its half-maximum span
  std::size_t lo = ib, hi = ib;
  while (lo > 0 && prof.ratio[lo - 1] >= 0.5 * best) --lo;
  while (hi + 1 < prof.ratio.size() && prof.ratio[hi + 1] >= 0.5 * best) ++hi;
  prof.peak_time = 0.5 * (prof.centers[lo] + prof.centers[hi]);
  return prof;
}

void save_basis(const MorseBasis& basis, const std::string& json_path, const std::string& csv_path) {
  nlohmann::ordered_json j;
  j["format"] = "decolab-morse-basis/1";
  j["params"] = {{"s", basis.params.s}, {"label", basis.params.label}};
  j["grid"] = {{"x_min", basis.grid.x_min}, {"x_max", basis.grid.x_max}, {"points", basis.grid.points}};
  j["n_basis"] = basis.size();
  j["n_bound"] = basis.n_bound;
  j["energies"] = std::vector<double>(basis.energies.data(), basis.energies.data() + basis.size());
  j["eigenvectors_csv"] = csv_path;
  std::ofstream(json_path) << j.dump(2) << "\n";
  std::ofstream csv(csv_path);
  csv << std::setprecision(17);
  for (Eigen::Index i = 0; i < basis.eigenvectors.rows(); ++i) {
    for (Eigen::Index n = 0; n < basis.eigenvectors.cols(); ++n)
      csv << (n ? "," : "") << basis.eigenvectors(i, n);
    csv << "\n";
  }
}

MorseBasis load_basis(const std::string& json_path, const std::string& csv_path) {
  std::ifstream jin(json_path);
  if (!jin) throw InputError("cannot open " + json_path);
  auto j = nlohmann::json::parse(jin);
  MorseBasis b;
  b.params.s = j.at("params").at("s").get<double>();
  b.params.label = j.at("params").at("label").get<std::string>();
  b.grid.x_min = j.at("grid").at("x_min").get<double>();
  b.grid.x_max = j.at("grid").at("x_max").get<double>();
  b.grid.points = j.at("grid").at("points").get<int>();
  auto e = j.at("energies").get<std::vector<double>>();
  b.energies = Eigen::Map<RVec>(e.data(), static_cast<Eigen::Index>(e.size()));
  b.n_bound = j.at("n_bound").get<int>();
  b.eigenvectors.resize(b.grid.points, b.energies.size());
  std::ifstream csv(csv_path);
  if (!csv) throw InputError("cannot open " + csv_path);
  std::string line;
  for (int i = 0; i < b.grid.points; ++i) {
    if (!std::getline(csv, line)) throw InputError("basis csv truncated");
    std::istringstream ls(line);
    std::string cell;
    for (Eigen::Index n = 0; n < b.energies.size(); ++n) {
      if (!std::getline(ls, cell, ',')) throw InputError("basis csv row too short");
      b.eigenvectors(i, n) = std::stod(cell);
    }
  }
  return b;
}

}  // namespace decolab::morse
