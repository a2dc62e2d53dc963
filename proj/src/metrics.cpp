#include "decolab/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <sstream>

#include <json.hpp>

namespace decolab::metrics {

double purity(const CMat& rho) { return rho.cwiseAbs2().sum(); }

double von_neumann_entropy(const CMat& rho, double eig_floor) {
  Eigen::SelfAdjointEigenSolver<CMat> es(rho, Eigen::EigenvaluesOnly);
  double s = 0;
  for (double l : es.eigenvalues()) {
    if (l < eig_floor) {
      std::ostringstream os;
      os << "entropy: eigenvalue " << l << " below floor " << eig_floor;
      throw NumericalError(os.str());
    }
    if (l > 0) s -= l * std::log(l);
  }
  return s;
}

DiagnosticAccumulator::DiagnosticAccumulator(RVec h, DiagnosticOptions opts) : h_(std::move(h)), opts_(opts) {}

void DiagnosticAccumulator::add(double t, const CMat& rho) {
  if (rho.rows() != h_.size()) throw InputError("diagnostics: energy vector does not match state dimension");
  if (!s_.times.empty() && !(t > s_.times.back())) throw InputError("diagnostics: times not ascending");
  double p = purity(rho);
  s_.times.push_back(t);
  s_.purity.push_back(p);
  s_.linear_entropy.push_back(1 - p);
  s_.participation.push_back(1 / p);
  s_.energy.push_back((rho.diagonal().real().array() * h_.array()).sum());
  s_.entropy.push_back(opts_.entropy ? von_neumann_entropy(rho, opts_.eig_floor) : std::nan(""));
}

DiagnosticSeries diagnostics(const std::vector<double>& times, const std::vector<CMat>& states, const RVec& h,
                             const DiagnosticOptions& opts) {
  if (times.size() != states.size()) throw InputError("diagnostics: times and states differ in length");
  DiagnosticAccumulator acc(h, opts);
  for (std::size_t i = 0; i < times.size(); ++i) acc.add(times[i], states[i]);
  return acc.series();
}

namespace {

struct SegmentFit {
  double ssr, a, b1, b2;
};

SegmentFit fit_at(const std::vector<double>& t, const std::vector<double>& y, double tb) {
  const Eigen::Index n = static_cast<Eigen::Index>(t.size());
  RMat A(n, 3);
  RVec b(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    A(i, 0) = 1;
    A(i, 1) = std::min(t[i] - tb, 0.0);
    A(i, 2) = std::max(t[i] - tb, 0.0);
    b[i] = y[i];
  }
  RVec c = A.colPivHouseholderQr().solve(b);
  return {(A * c - b).squaredNorm(), c[0], c[1], c[2]};
}

}  // namespace

KneeReport detect_knee(const std::vector<double>& t, const std::vector<double>& y, double min_ratio) {
  const std::size_t n = t.size();
  if (n != y.size()) throw InputError("detect_knee: length mismatch");
  if (n < 6) throw InputError("detect_knee: need at least 6 samples");
  for (std::size_t i = 1; i < n; ++i)
    if (!(t[i] > t[i - 1])) throw InputError("detect_knee: times not ascending");

  std::size_t best = 2;
  double best_ssr = INFINITY;
  for (std::size_t i = 2; i + 2 < n; ++i) {
    double s = fit_at(t, y, t[i]).ssr;
    if (s < best_ssr) {
      best_ssr = s;
      best = i;
    }
  }
  // golden-section refinement between the neighbouring samples
  double lo = t[best - 1], hi = t[best + 1];
  const double g = (std::sqrt(5.0) - 1) / 2;
  double x1 = hi - g * (hi - lo), x2 = lo + g * (hi - lo);
  double f1 = fit_at(t, y, x1).ssr, f2 = fit_at(t, y, x2).ssr;
  for (int it = 0; it < 200 && hi - lo > 1e-12 * (t.back() - t.front()); ++it) {
    if (f1 < f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - g * (hi - lo);
      f1 = fit_at(t, y, x1).ssr;
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + g * (hi - lo);
      f2 = fit_at(t, y, x2).ssr;
    }
  }
  double tb = 0.5 * (lo + hi);
  SegmentFit fit = fit_at(t, y, tb);
  if (fit.ssr > best_ssr) {
    tb = t[best];
    fit = fit_at(t, y, tb);
  }

  KneeReport r;
  r.t_d = tb;
  r.slope_early = fit.b1;
  r.slope_late = fit.b2;
  r.residual = fit.ssr;
  r.ratio = std::fabs(fit.b2) > 0 ? std::fabs(fit.b1) / std::fabs(fit.b2) : INFINITY;
  r.separated = r.ratio >= min_ratio;
  return r;
}

double relaxation_time(const std::vector<double>& t, const std::vector<double>& y, double t_from,
                       double asymptote, double t_to) {
  if (t.size() != y.size()) throw InputError("relaxation_time: length mismatch");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i] < t_from || (t_to > 0 && t[i] > t_to)) continue;
    double d = std::fabs(y[i] - asymptote);
    if (!(d > 0)) continue;
    double ly = std::log(d);
    sx += t[i];
    sy += ly;
    sxx += t[i] * t[i];
    sxy += t[i] * ly;
    ++n;
  }
  if (n < 3) throw InputError("relaxation_time: fewer than 3 samples in the fit window");
  double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  if (!(slope < 0)) throw NumericalError("relaxation_time: no decay in the fit window");
  return -1 / slope;
}

SchmidtResult schmidt(const CVec& psi, int dA, int dB) {
  if (dA < 1 || dB < 1 || psi.size() != static_cast<Eigen::Index>(dA) * dB)
    throw InputError("schmidt: vector length does not match dA*dB");
  if (std::fabs(psi.squaredNorm() - 1) > 1e-10) throw InputError("schmidt: state not normalized");
  CMat M(dA, dB);
  for (int a = 0; a < dA; ++a)
    for (int b = 0; b < dB; ++b) M(a, b) = psi[static_cast<Eigen::Index>(a) * dB + b];
  Eigen::JacobiSVD<CMat> svd(M, Eigen::ComputeThinU | Eigen::ComputeThinV);
  SchmidtResult r;
  const RVec& s = svd.singularValues();
  for (Eigen::Index k = 0; k < s.size(); ++k) r.p.push_back(s[k] * s[k]);
  r.U = svd.matrixU();
  r.V = svd.matrixV().conjugate();  // psi = sum_k s_k U_k (x) V_k
  CMat rec = r.U * s.cast<cplx>().asDiagonal() * r.V.transpose();
  r.reconstruction_error = (rec - M).cwiseAbs().maxCoeff();
  return r;
}

double participation(const std::vector<double>& p) {
  double s = 0;
  for (double v : p) s += v * v;
  return 1 / s;
}

double entanglement_rate_generic(const CMat& V, const CMat& sys, const CMat& env) {
  const Eigen::Index dS = sys.rows(), dE = env.rows();
  if (sys.cols() != dS || env.cols() != dE) throw InputError("entanglement_rate_generic: bases must be square");
  if (V.rows() != dS * dE || V.cols() != dS * dE) throw InputError("entanglement_rate_generic: V shape mismatch");
  auto check = [](const CMat& b, const char* what) {
    double e = (b.adjoint() * b - CMat::Identity(b.cols(), b.cols())).cwiseAbs().maxCoeff();
    if (e > 1e-10) throw InputError(std::string("entanglement_rate_generic: ") + what + " basis not orthonormal");
  };
  check(sys, "system");
  check(env, "environment");
  CVec in(dS * dE);
  for (Eigen::Index a = 0; a < dS; ++a)
    for (Eigen::Index b = 0; b < dE; ++b) in[a * dE + b] = sys(a, 0) * env(b, 0);
  CVec out = V * in;
  // coefficients in the product basis: C = sys^dagger M env^*
  CMat M(dS, dE);
  for (Eigen::Index a = 0; a < dS; ++a)
    for (Eigen::Index b = 0; b < dE; ++b) M(a, b) = out[a * dE + b];
  CMat C = sys.adjoint() * M * env.conjugate();
  double A = 0;
  for (Eigen::Index k = 1; k < dS; ++k)
    for (Eigen::Index l = 1; l < dE; ++l) A += std::norm(C(k, l));
  return A;
}

std::vector<CMat> toy_dephasing(const CVec& c, const OverlapSchedule& f, const std::vector<double>& times) {
  const Eigen::Index d = c.size();
  if (std::fabs(c.squaredNorm() - 1) > 1e-10) throw InputError("toy_dephasing: coefficients not normalized");
  CMat rho0 = c * c.adjoint();
  std::vector<CMat> out;
  for (double t : times) {
    CMat F = f(t);
    if (F.rows() != d || F.cols() != d) throw InputError("toy_dephasing: overlap matrix shape mismatch");
    for (Eigen::Index n = 0; n < d; ++n) {
      if (std::abs(F(n, n) - cplx(1, 0)) > 1e-12) throw InputError("toy_dephasing: f_nn must be 1");
      for (Eigen::Index m = 0; m < d; ++m) {
        if (std::abs(F(n, m)) > 1 + 1e-12) throw InputError("toy_dephasing: |f_nm| > 1");
        if (std::abs(F(n, m) - std::conj(F(m, n))) > 1e-12)
          throw InputError("toy_dephasing: overlap schedule not Hermitian");
      }
    }
    out.push_back(rho0.cwiseProduct(F));
  }
  return out;
}

void write_series_csv(const std::string& path, const DiagnosticSeries& s) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path);
  out << std::setprecision(12) << "t,entropy,linear_entropy,purity,participation,energy\n";
  for (std::size_t i = 0; i < s.times.size(); ++i)
    out << s.times[i] << "," << s.entropy[i] << "," << s.linear_entropy[i] << "," << s.purity[i] << ","
        << s.participation[i] << "," << s.energy[i] << "\n";
}

std::string knee_json(const KneeReport& k) {
  nlohmann::ordered_json j;
  j["method"] = k.method;
  j["separated"] = k.separated;
  j["t_d"] = k.t_d;
  j["slope_early"] = k.slope_early;
  j["slope_late"] = k.slope_late;
  j["slope_ratio"] = k.ratio;
  j["residual"] = k.residual;
  return j.dump(2);
}

void write_knee_json(const std::string& path, const KneeReport& k) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path);
  out << knee_json(k) << "\n";
}

}  // namespace decolab::metrics
