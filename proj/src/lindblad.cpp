#include "decolab/lindblad.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "decolab/kernels.hpp"

namespace decolab::lindblad {

double mean_occupation(double omega, double omega01, double temperature) {
  if (temperature < 0) throw InputError("negative temperature");
  if (temperature == 0) return 0.0;
  return 1.0 / std::expm1(omega / (omega01 * temperature));
}

namespace {

void require_square(const CMat& rho, Eigen::Index d, const char* what) {
  if (rho.rows() != d || rho.cols() != d) throw InputError(std::string(what) + ": shape mismatch");
}

}  // namespace

AnharmonicGenerator build_anharmonic_generator(const RVec& energies, const RMat& X,
                                               const BathSpec& bath, double omega_scale) {
  const Eigen::Index d = energies.size();
  if (X.rows() != d || X.cols() != d) throw InputError("anharmonic generator: shape mismatch");
  if ((X - X.transpose()).cwiseAbs().maxCoeff() > 1e-10 * std::max(1.0, X.cwiseAbs().maxCoeff()))
    throw InputError("anharmonic generator: X is not Hermitian");
  if (bath.temperature < 0) throw InputError("anharmonic generator: negative temperature");
  if (!(bath.lambda > 0)) throw InputError("anharmonic generator: lambda must be positive");
  for (Eigen::Index i = 1; i < d; ++i)
    if (!(energies[i] > energies[i - 1])) throw InputError("anharmonic generator: energies not ascending");

  AnharmonicGenerator g;
  g.energies = energies;
  g.X = X;
  g.omega_scale = omega_scale;
  g.bath = bath;
  g.L = X.triangularView<Eigen::StrictlyUpper>();
  g.R = g.L.transpose();
  g.Le = RMat::Zero(d, d);
  g.Ra = RMat::Zero(d, d);
  g.gamma = RMat::Zero(d, d);
  const double w01 = d > 1 ? energies[1] - energies[0] : 1.0;
  const double p = bath.spectral_exponent;
  for (Eigen::Index m = 0; m < d; ++m)
    for (Eigen::Index n = m + 1; n < d; ++n) {
      const double w = energies[n] - energies[m];
      const double nb = mean_occupation(w, w01, bath.temperature);
      const double c = bath.lambda * std::pow(w, p);
      g.Le(m, n) = g.L(m, n) * c * (nb + 1);
      g.Ra(n, m) = g.R(n, m) * c * nb;
      g.gamma(m, n) = 2 * g.Le(m, n) * X(m, n);  // emission n -> m
      g.gamma(n, m) = 2 * g.Ra(n, m) * X(n, m);  // absorption m -> n
    }
  g.Lc = g.L.cast<cplx>();
  g.Rc = g.R.cast<cplx>();
  g.Lec = g.Le.cast<cplx>();
  g.Rac = g.Ra.cast<cplx>();
  g.anti = (g.R * g.Le + g.L * g.Ra).cast<cplx>();
  return g;
}

double calibrate_lambda(const RVec& energies, const RMat& X, double omega_scale, double ratio) {
  if (energies.size() < 2) throw InputError("calibration needs two levels");
  const double w = energies[1] - energies[0];
  const double g01 = 2 * X(0, 1) * X(0, 1) * std::pow(w, 3);
  return omega_scale * w / (ratio * g01);
}

CMat rhs_full(const AnharmonicGenerator& g, const CMat& rho) {
  const Eigen::Index d = g.energies.size();
  require_square(rho, d, "rhs_full");
  CMat out(d, d);
  for (Eigen::Index j = 0; j < d; ++j)
    for (Eigen::Index i = 0; i < d; ++i)
      out(i, j) = cplx(0, -g.omega_scale * (g.energies[i] - g.energies[j])) * rho(i, j);
  out.noalias() -= g.anti * rho;
  out.noalias() -= rho * g.anti.adjoint();
  out.noalias() += g.Rac * (rho * g.Lc);
  out.noalias() += g.Lec * (rho * g.Rc);
  out.noalias() += g.Rc * (rho * g.Rac.adjoint());
  out.noalias() += g.Lc * (rho * g.Lec.adjoint());
  return out;
}

namespace {

void secular_dissipator(const RMat& gamma, const CMat& rho, CMat& out) {
  const Eigen::Index d = gamma.rows();
  RVec loss = gamma.colwise().sum().transpose();  // total rate out of each level
  out.resize(d, d);
  for (Eigen::Index j = 0; j < d; ++j)
    for (Eigen::Index i = 0; i < d; ++i) out(i, j) = -0.5 * (loss[i] + loss[j]) * rho(i, j);
  RVec pop = rho.diagonal().real();
  RVec gain = gamma * pop;
  for (Eigen::Index i = 0; i < d; ++i) out(i, i) += gain[i];
}

}  // namespace

CMat rhs_secular(const AnharmonicGenerator& g, const CMat& rho) {
  const Eigen::Index d = g.energies.size();
  require_square(rho, d, "rhs_secular");
  CMat out;
  secular_dissipator(g.gamma, rho, out);
  for (Eigen::Index j = 0; j < d; ++j)
    for (Eigen::Index i = 0; i < d; ++i)
      out(i, j) += cplx(0, -g.omega_scale * (g.energies[i] - g.energies[j])) * rho(i, j);
  return out;
}

RVec pauli_rhs(const RMat& gamma, const RVec& P) {
  if (gamma.rows() != P.size()) throw InputError("pauli_rhs: shape mismatch");
  if (P.size() && P.minCoeff() < -1e-12) throw InputError("pauli_rhs: negative population");
  RVec loss = gamma.colwise().sum().transpose();
  return gamma * P - loss.cwiseProduct(P);
}

RVec pauli_stationary(const RMat& gamma) {
  const Eigen::Index d = gamma.rows();
  RMat W = gamma;
  RVec loss = gamma.colwise().sum().transpose();
  for (Eigen::Index i = 0; i < d; ++i) W(i, i) = -loss[i];
  // normalization replaces the last balance equation
  W.row(d - 1).setOnes();
  RVec rhs = RVec::Zero(d);
  rhs[d - 1] = 1;
  RVec P = W.fullPivLu().solve(rhs);
  return P;
}

RVec boltzmann(const RVec& energies, double temperature) {
  const Eigen::Index d = energies.size();
  RVec P = RVec::Zero(d);
  if (temperature == 0) {
    P[0] = 1;
    return P;
  }
  const double w01 = energies[1] - energies[0];
  for (Eigen::Index n = 0; n < d; ++n) P[n] = std::exp(-(energies[n] - energies[0]) / (w01 * temperature));
  return P / P.sum();
}

DickeGenerator build_dicke_generator(double j, double gamma, double n_bar) {
  const double twoj = 2 * j;
  if (j <= 0 || std::fabs(twoj - std::round(twoj)) > 1e-12) throw InputError("invalid j");
  if (n_bar < 0) throw InputError("negative mean photon number");
  const int d = static_cast<int>(std::lround(twoj)) + 1;
  DickeGenerator g;
  g.j = j;
  g.gamma = gamma;
  g.n_bar = n_bar;
  g.cm = RVec::Zero(d + 1);
  for (int a = 1; a < d; ++a) {
    double m = -j + a;
    g.cm[a] = std::sqrt(j * (j + 1) - m * (m - 1));
  }
  g.Jm = RMat::Zero(d, d);
  for (int a = 1; a < d; ++a) g.Jm(a - 1, a) = g.cm[a];
  g.Jp = g.Jm.transpose();
  return g;
}

void dicke_rhs(const DickeGenerator& g, const CMat& rho, CMat& out) {
  const Eigen::Index d = g.Jm.rows();
  require_square(rho, d, "dicke_rhs");
  out.resize(d, d);
  const double ge = 0.5 * g.gamma * (g.n_bar + 1);
  const double ga = 0.5 * g.gamma * g.n_bar;
  // A = diag(J+J-), B = diag(J-J+)
  RVec A(d), B(d);
  for (Eigen::Index a = 0; a < d; ++a) {
    A[a] = g.cm[a] * g.cm[a];
    B[a] = g.cm[a + 1] * g.cm[a + 1];
  }
  std::vector<double> dc(d), uc(d), wc(d);
  for (Eigen::Index b = 0; b < d; ++b) {
    for (Eigen::Index a = 0; a < d; ++a) {
      dc[a] = -(ge * (A[a] + A[b]) + ga * (B[a] + B[b]));
      uc[a] = 2 * ge * g.cm[a + 1] * g.cm[b + 1];
      wc[a] = 2 * ga * g.cm[a] * g.cm[b];
    }
    const cplx* x = rho.data() + b * d;
    cplx* o = out.data() + b * d;
    // rho(a+1, b+1) and rho(a-1, b-1) as shifted column views; coefficients
    // vanish where the shifted index falls outside the matrix.
    const cplx* up = b + 1 < d ? rho.data() + (b + 1) * d + 1 : x;  // up[a] = rho(a+1, b+1)
    const cplx* dn = b > 0 ? rho.data() + (b - 1) * d : x;          // dn[a-1] = rho(a-1, b-1)
    if (b + 1 >= d) std::fill(uc.begin(), uc.end(), 0.0);
    if (b == 0) std::fill(wc.begin(), wc.end(), 0.0);
    // interior rows through the kernel, edges by hand
    if (d > 2)
      kernels::triad(o + 1, dc.data() + 1, x + 1, uc.data() + 1, up + 1, wc.data() + 1, dn,
                     static_cast<std::size_t>(d - 2));
    o[0] = dc[0] * x[0] + uc[0] * up[0];
    const Eigen::Index l = d - 1;
    o[l] = dc[l] * x[l] + wc[l] * dn[l - 1];
  }
}

CMat dicke_rhs(const DickeGenerator& g, const CMat& rho) {
  CMat out;
  dicke_rhs(g, rho, out);
  return out;
}

PresetKind preset_kind(const std::string& name) {
  if (name == "amplitude_damping") return PresetKind::amplitude_damping;
  if (name == "phase_relaxation") return PresetKind::phase_relaxation;
  throw InputError("unknown preset: " + name);
}

HarmonicPreset preset(const std::string& name, int dim, double gamma, double n_bar, double frequency) {
  if (dim < 2) throw InputError("preset: dim must be at least 2");
  if (n_bar < 0) throw InputError("preset: negative mean photon number");
  HarmonicPreset p{preset_kind(name), dim, gamma, n_bar, frequency, RMat::Zero(dim, dim)};
  for (int n = 1; n < dim; ++n) p.a(n - 1, n) = std::sqrt(double(n));
  return p;
}

namespace {

void preset_dissipator(const HarmonicPreset& p, const CMat& rho, CMat& out) {
  const Eigen::Index d = p.dim;
  if (p.kind == PresetKind::phase_relaxation) {
    // gamma/2 (2 N rho N - N N rho - rho N N), elementwise since N is diagonal
    out.resize(d, d);
    for (Eigen::Index j = 0; j < d; ++j)
      for (Eigen::Index i = 0; i < d; ++i) {
        double ni = i, nj = j;
        out(i, j) = 0.5 * p.gamma * (2 * ni * nj - ni * ni - nj * nj) * rho(i, j);
      }
    return;
  }
  const CMat a = p.a.cast<cplx>();
  const CMat ad = a.adjoint();
  const CMat ada = ad * a, aad = a * ad;
  const double ge = 0.5 * p.gamma * (p.n_bar + 1), ga = 0.5 * p.gamma * p.n_bar;
  out = ge * (2.0 * a * rho * ad - ada * rho - rho * ada) +
        ga * (2.0 * ad * rho * a - aad * rho - rho * aad);
}

}  // namespace

CMat preset_rhs(const HarmonicPreset& p, const CMat& rho) {
  require_square(rho, p.dim, "preset_rhs");
  CMat out;
  preset_dissipator(p, rho, out);
  for (Eigen::Index j = 0; j < p.dim; ++j)
    for (Eigen::Index i = 0; i < p.dim; ++i) out(i, j) += cplx(0, -p.frequency * double(i - j)) * rho(i, j);
  return out;
}

Generator make_generator(const AnharmonicGenerator& g, AnharmonicMode mode) {
  Generator out;
  out.dim = static_cast<int>(g.energies.size());
  out.frame = g.omega_scale * g.energies;
  if (mode == AnharmonicMode::secular) {
    RMat gamma = g.gamma;
    out.dissipator = [gamma](const CMat& rho, CMat& o) { secular_dissipator(gamma, rho, o); };
    return out;
  }
  // Hermitian input assumed: the adjoint terms are formed by symmetry.
  out.dissipator = [&g](const CMat& rho, CMat& o) {
    CMat t = g.anti * rho;
    o.noalias() = -t;
    CMat gain = g.Rac * (rho * g.Lc);
    gain.noalias() += g.Lec * (rho * g.Rc);
    o += gain;
    o -= t.adjoint();
    o += gain.adjoint();
  };
  return out;
}

Generator make_generator(const DickeGenerator& g) {
  Generator out;
  out.dim = static_cast<int>(g.Jm.rows());
  out.dissipator = [&g](const CMat& rho, CMat& o) { dicke_rhs(g, rho, o); };
  return out;
}

Generator make_generator(const HarmonicPreset& p) {
  Generator out;
  out.dim = p.dim;
  if (p.frequency != 0) {
    out.frame = RVec(p.dim);
    for (int n = 0; n < p.dim; ++n) out.frame[n] = p.frequency * n;
  }
  out.dissipator = [p](const CMat& rho, CMat& o) { preset_dissipator(p, rho, o); };
  return out;
}

Generator zero_generator(int dim) {
  Generator out;
  out.dim = dim;
  out.dissipator = [dim](const CMat&, CMat& o) { o = CMat::Zero(dim, dim); };
  return out;
}

void write_trajectory_csv(const std::string& path, const std::vector<double>& times,
                          const std::vector<std::string>& names,
                          const std::vector<std::vector<double>>& columns) {
  if (names.size() != columns.size()) throw InputError("trajectory csv: column count mismatch");
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path);
  out << "t";
  for (const auto& n : names) out << "," << n;
  out << "\n" << std::setprecision(12);
  for (std::size_t i = 0; i < times.size(); ++i) {
    out << times[i];
    for (const auto& c : columns) out << "," << c.at(i);
    out << "\n";
  }
}

void write_snapshot(const std::string& path, const CMat& rho) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path);
  out << "dim," << rho.rows() << "\n" << std::setprecision(17);
  for (Eigen::Index j = 0; j < rho.cols(); ++j)
    for (Eigen::Index i = 0; i < rho.rows(); ++i)
      out << i << "," << j << "," << rho(i, j).real() << "," << rho(i, j).imag() << "\n";
}

CMat read_snapshot(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path);
  std::string line;
  std::getline(in, line);
  if (line.rfind("dim,", 0) != 0) throw InputError("snapshot header missing");
  const int d = std::stoi(line.substr(4));
  CMat rho = CMat::Zero(d, d);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string f[4];
    for (auto& s : f) std::getline(ls, s, ',');
    rho(std::stoi(f[0]), std::stoi(f[1])) = cplx(std::stod(f[2]), std::stod(f[3]));
  }
  return rho;
}

}  // namespace decolab::lindblad
