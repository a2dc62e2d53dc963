#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <vector>

#include <quadmath.h>

#include "decolab/phase_space.hpp"
#include "decolab/special.hpp"

namespace decolab::phase {

namespace {

using quad = __float128;

const std::vector<quad>& factorials(int n) {
  static std::vector<quad> table{1};
  static std::mutex mu;
  std::lock_guard<std::mutex> lock(mu);
  while (static_cast<int>(table.size()) <= n) table.push_back(table.back() * static_cast<quad>(table.size()));
  return table;
}

// twice a half-integer, checked
int twice(double v, const char* what) {
  double t = 2 * v;
  if (std::fabs(t - std::round(t)) > 1e-9) throw InputError(std::string(what) + " is not a half-integer");
  return static_cast<int>(std::lround(t));
}

int spin_dim(double j) {
  int tj = twice(j, "j");
  if (tj < 1) throw InputError("spherical Wigner: j must be positive");
  return tj + 1;
}

}  // namespace

double clebsch_gordan(double j1, double m1, double j2, double m2, double J, double M) {
  const int tj1 = twice(j1, "j1"), tm1 = twice(m1, "m1"), tj2 = twice(j2, "j2"), tm2 = twice(m2, "m2"),
            tJ = twice(J, "J"), tM = twice(M, "M");
  if (tm1 + tm2 != tM) return 0;
  if (std::abs(tm1) > tj1 || std::abs(tm2) > tj2 || std::abs(tM) > tJ) return 0;
  if ((tj1 + tm1) % 2 || (tj2 + tm2) % 2 || (tJ + tM) % 2) return 0;
  if (tJ > tj1 + tj2 || tJ < std::abs(tj1 - tj2) || (tj1 + tj2 + tJ) % 2) return 0;

  // integer arguments of the factorials
  const int a = (tJ + tj1 - tj2) / 2, b = (tJ - tj1 + tj2) / 2, c = (tj1 + tj2 - tJ) / 2,
            top = (tj1 + tj2 + tJ) / 2 + 1;
  const int jpm = (tJ + tM) / 2, jmm = (tJ - tM) / 2, j1m = (tj1 - tm1) / 2, j1p = (tj1 + tm1) / 2,
            j2m = (tj2 - tm2) / 2, j2p = (tj2 + tm2) / 2;
  const auto& f = factorials(top + 1);
  quad pre = (tJ + 1) * f[a] * f[b] * f[c] / f[top];
  pre *= f[jpm] * f[jmm] * f[j1m] * f[j1p] * f[j2m] * f[j2p];
  pre = sqrtq(pre);

  const int o1 = (tJ - tj2 + tm1) / 2, o2 = (tJ - tj1 - tm2) / 2;
  int kmin = std::max({0, -o1, -o2});
  int kmax = std::min({c, j1m, j2p});
  quad sum = 0;
  for (int k = kmin; k <= kmax; ++k) {
    quad den = f[k] * f[c - k] * f[j1m - k] * f[j2p - k] * f[o1 + k] * f[o2 + k];
    sum += (k % 2 ? -1 : 1) / den;
  }
  return static_cast<double>(pre * sum);
}

namespace {

// Nonzero band of every T_KQ for one j: band(K, Q)[a] = <a+Q|T_KQ|a>.
class MultipoleTable {
 public:
  explicit MultipoleTable(double j) : d_(spin_dim(j)), data_(static_cast<std::size_t>(d_) * d_ * d_, 0.0) {
    for (int K = 0; K < d_; ++K) {
      const double pref = std::sqrt((2.0 * K + 1) / d_);
      for (int Q = -K; Q <= K; ++Q)
        for (int a = std::max(0, -Q); a < std::min(d_, d_ - Q); ++a)
          data_[offset(K, Q) + a] = pref * clebsch_gordan(j, -j + a, K, Q, j, -j + a + Q);
    }
  }
  const double* band(int K, int Q) const { return data_.data() + offset(K, Q); }

 private:
  std::size_t offset(int K, int Q) const {
    return (static_cast<std::size_t>(K) * K + (Q + K)) * d_;
  }
  int d_;
  std::vector<double> data_;
};

const MultipoleTable& table_for(double j) {
  static std::map<int, std::unique_ptr<MultipoleTable>> cache;
  static std::mutex mu;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[twice(j, "j")];
  if (!slot) slot = std::make_unique<MultipoleTable>(j);
  return *slot;
}

void check_kq(int K, int Q, int d) {
  if (K < 0 || K > d - 1) throw InputError("multipole_operator: K out of range 0..2j");
  if (std::abs(Q) > K) throw InputError("multipole_operator: |Q| > K");
}

}  // namespace

RMat multipole_operator(int K, int Q, double j) {
  const int d = spin_dim(j);
  check_kq(K, Q, d);
  const double* b = table_for(j).band(K, Q);
  RMat T = RMat::Zero(d, d);
  for (int a = std::max(0, -Q); a < std::min(d, d - Q); ++a) T(a + Q, a) = b[a];
  return T;
}

cplx multipole_moment(const CMat& rho, int K, int Q, double j) {
  const int d = spin_dim(j);
  if (rho.rows() != d || rho.cols() != d) throw InputError("multipole_moment: dimension mismatch");
  check_kq(K, Q, d);
  const double* b = table_for(j).band(K, Q);
  cplx s = 0;
  for (int a = std::max(0, -Q); a < std::min(d, d - Q); ++a) s += b[a] * rho(a + Q, a);
  return s;
}

namespace {

struct Moments {
  int kmax;
  // mom[Q + kmax][K]
  std::vector<std::vector<cplx>> mom;
};

Moments all_moments(const CMat& rho, double j) {
  const int d = spin_dim(j);
  if (rho.rows() != d || rho.cols() != d) throw InputError("wigner_spherical: dimension mismatch");
  Moments m{d - 1, {}};
  m.mom.assign(2 * m.kmax + 1, std::vector<cplx>(m.kmax + 1, 0.0));
  for (int K = 0; K <= m.kmax; ++K)
    for (int Q = -K; Q <= K; ++Q) m.mom[Q + m.kmax][K] = multipole_moment(rho, K, Q, j);
  return m;
}

// theta-dependent coefficients g_Q(theta) for Q = -kmax..kmax
void theta_part(const Moments& m, double ct, std::vector<cplx>& g) {
  const int kmax = m.kmax;
  g.assign(2 * kmax + 1, 0.0);
  std::vector<double> leg;
  for (int Q = 0; Q <= kmax; ++Q) {
    special::normalized_legendre(kmax, Q, ct, leg);
    cplx gp = 0, gm = 0;
    const double sg = Q % 2 ? -1 : 1;  // Y_{K,-Q} = (-1)^Q conj(Y_KQ)
    for (int K = Q; K <= kmax; ++K) {
      gp += m.mom[Q + kmax][K] * leg[K - Q];
      if (Q > 0) gm += m.mom[-Q + kmax][K] * sg * leg[K - Q];
    }
    g[Q + kmax] = gp;
    if (Q > 0) g[-Q + kmax] = gm;
  }
}

double kernel_scale(double j) { return std::sqrt((2 * j + 1) / (4 * std::numbers::pi)); }

}  // namespace

WignerGrid wigner_spherical(const CMat& rho, double j, const SphericalSpec& spec) {
  const int d = spin_dim(j);
  const int nt = spec.n_theta > 0 ? spec.n_theta : d + 1;
  const int nph = spec.n_phi > 0 ? spec.n_phi : 2 * d + 2;
  Moments m = all_moments(rho, j);
  const int kmax = m.kmax;

  WignerGrid w;
  w.geometry = Geometry::spherical;
  std::vector<double> x, gw;
  special::gauss_legendre(nt, x, gw);
  // theta ascending: cos(theta) descending
  w.axis1.resize(nt);
  std::vector<double> wt(nt);
  for (int i = 0; i < nt; ++i) {
    w.axis1[i] = std::acos(x[nt - 1 - i]);
    wt[i] = gw[nt - 1 - i];
  }
  const double dphi = 2 * std::numbers::pi / nph;
  w.axis2.resize(nph);
  for (int k = 0; k < nph; ++k) w.axis2[k] = k * dphi;
  w.values.resize(static_cast<std::size_t>(nt) * nph);
  w.weights.resize(w.values.size());

  const double scale = kernel_scale(j);
  std::vector<cplx> g;
  double resid = 0;
  for (int i = 0; i < nt; ++i) {
    theta_part(m, std::cos(w.axis1[i]), g);
    for (int k = 0; k < nph; ++k) {
      cplx s = 0;
      for (int Q = -kmax; Q <= kmax; ++Q) s += g[Q + kmax] * std::polar(1.0, Q * w.axis2[k]);
      s *= scale;
      resid = std::max(resid, std::fabs(s.imag()));
      std::size_t idx = static_cast<std::size_t>(i) * nph + k;
      w.values[idx] = s.real();
      w.weights[idx] = wt[i] * dphi;
    }
  }
  w.imag_residue = resid;
  return w;
}

double wigner_spherical_at(const CMat& rho, double j, double theta, double phi) {
  Moments m = all_moments(rho, j);
  std::vector<cplx> g;
  theta_part(m, std::cos(theta), g);
  cplx s = 0;
  for (int Q = -m.kmax; Q <= m.kmax; ++Q) s += g[Q + m.kmax] * std::polar(1.0, Q * phi);
  return kernel_scale(j) * s.real();
}

CMat spherical_inverse(const WignerGrid& w, double j) {
  if (w.geometry != Geometry::spherical) throw InputError("spherical_inverse: planar grid");
  const int d = spin_dim(j);
  const int kmax = d - 1;
  const std::size_t nt = w.n1(), nph = w.n2();
  CMat rho = CMat::Zero(d, d);
  std::vector<double> leg;
  const double inv = 1 / kernel_scale(j);
  for (int Q = -kmax; Q <= kmax; ++Q) {
    const int aq = std::abs(Q);
    const double sg = (Q < 0 && aq % 2) ? -1 : 1;
    // integrals of W Y_KQ^* for all K >= |Q|
    std::vector<cplx> c(kmax + 1, 0.0);
    for (std::size_t i = 0; i < nt; ++i) {
      cplx ph = 0;
      for (std::size_t k = 0; k < nph; ++k) {
        std::size_t idx = i * nph + k;
        ph += w.values[idx] * w.weights[idx] * std::polar(1.0, -Q * w.axis2[k]);
      }
      special::normalized_legendre(kmax, aq, std::cos(w.axis1[i]), leg);
      for (int K = aq; K <= kmax; ++K) c[K] += ph * sg * leg[K - aq];
    }
    for (int K = aq; K <= kmax; ++K) rho += (inv * c[K]) * multipole_operator(K, Q, j).cast<cplx>();
  }
  return rho;
}

}  // namespace decolab::phase
