#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <iomanip>
#include <numbers>
#include <sstream>

#include "decolab/phase_space.hpp"

namespace decolab::phase {

double WignerGrid::integral() const {
  double s = 0;
  for (std::size_t i = 0; i < values.size(); ++i) s += values[i] * weights[i];
  return s;
}

namespace {

struct Nodes {
  std::vector<int> index;  // grid index of each x node
  double dx_out;
};

Nodes snap_nodes(const morse::GridSpec& grid, const PlanarSpec& spec) {
  if (spec.nx < 2 || spec.np < 2) throw InputError("planar Wigner: need at least 2 nodes per axis");
  if (!(spec.x_max > spec.x_min) || !(spec.p_max > spec.p_min)) throw InputError("planar Wigner: empty range");
  const double dx = grid.dx();
  int stride = std::max(1, static_cast<int>(std::lround((spec.x_max - spec.x_min) / (spec.nx - 1) / dx)));
  int i0 = static_cast<int>(std::lround((spec.x_min - grid.x_min) / dx));
  Nodes n{{}, stride * dx};
  for (int k = 0; k < spec.nx; ++k) {
    int gi = i0 + k * stride;
    if (gi < 0 || gi >= grid.points) throw InputError("planar Wigner: x range exceeds the wavefunction grid");
    n.index.push_back(gi);
  }
  return n;
}

// W(x_i, p) = dx/pi [F(i,0) + 2 sum_k Re(F(i,k) e^{2ik dx p})], F(i,k) = rho(x_{i-k}, x_{i+k})
WignerGrid planar_core(const morse::GridSpec& grid, const PlanarSpec& spec,
                       const std::function<cplx(int, int)>& F) {
  Nodes nodes = snap_nodes(grid, spec);
  const int M = grid.points, nx = spec.nx, np = spec.np;
  const double dx = grid.dx();
  int kmax = 0;
  for (int gi : nodes.index) kmax = std::max(kmax, std::min(gi, M - 1 - gi));

  WignerGrid w;
  w.geometry = Geometry::planar;
  w.axis1.resize(nx);
  for (int i = 0; i < nx; ++i) w.axis1[i] = grid.x(nodes.index[i]);
  w.axis2.resize(np);
  const double dp = (spec.p_max - spec.p_min) / (np - 1);
  for (int k = 0; k < np; ++k) w.axis2[k] = spec.p_min + k * dp;

  CMat Fm = CMat::Zero(nx, kmax + 1);
  double resid = 0;
  for (int i = 0; i < nx; ++i) {
    int gi = nodes.index[i];
    int kl = std::min(gi, M - 1 - gi);
    for (int k = 0; k <= kl; ++k) Fm(i, k) = F(gi, k);
    resid = std::max(resid, std::fabs(Fm(i, 0).imag()));
    Fm(i, 0) *= 0.5;
  }
  CMat E(kmax + 1, np);
  for (int k = 0; k <= kmax; ++k)
    for (int q = 0; q < np; ++q) E(k, q) = std::polar(1.0, 2 * k * dx * w.axis2[q]);
  RMat W = (2 * dx / std::numbers::pi) * (Fm * E).real();

  w.values.resize(static_cast<std::size_t>(nx) * np);
  w.weights.assign(w.values.size(), nodes.dx_out * dp);
  for (int i = 0; i < nx; ++i)
    for (int q = 0; q < np; ++q) w.values[static_cast<std::size_t>(i) * np + q] = W(i, q);
  w.imag_residue = resid;
  return w;
}

}  // namespace

WignerGrid wigner_planar_pure(const CVec& psi, const morse::GridSpec& grid, const PlanarSpec& spec) {
  if (psi.size() != grid.points) throw InputError("wigner_planar_pure: wavefunction length does not match grid");
  double norm = psi.squaredNorm() * grid.dx();
  if (std::fabs(norm - 1) > 1e-6)
    throw InputError("wigner_planar_pure: wavefunction not normalized (norm " + std::to_string(norm) + ")");
  return planar_core(grid, spec, [&](int i, int k) { return psi[i - k] * std::conj(psi[i + k]); });
}

WignerGrid wigner_planar_mixed(const CMat& rho_x, const morse::GridSpec& grid, const PlanarSpec& spec) {
  if (rho_x.rows() != grid.points || rho_x.cols() != grid.points)
    throw InputError("wigner_planar_mixed: density matrix does not match grid");
  return planar_core(grid, spec, [&](int i, int k) { return rho_x(i - k, i + k); });
}

WignerGrid wigner_planar_mixed(const CMat& rho, const morse::MorseBasis& basis, const PlanarSpec& spec) {
  const int nb = basis.size();
  if (rho.rows() > nb || rho.rows() != rho.cols())
    throw InputError("wigner_planar_mixed: density matrix does not match basis");
  const int n = static_cast<int>(rho.rows());
  // rho(x_a, x_b) = sum_m Psi(a,m) C(b,m), C = Psi rho^T
  RMat Pt = basis.eigenvectors.leftCols(n).transpose();
  CMat Ct = rho * Pt.cast<cplx>();  // column b holds C(b, .)
  return planar_core(basis.grid, spec, [&](int i, int k) {
    return Pt.col(i - k).cast<cplx>().cwiseProduct(Ct.col(i + k)).sum();
  });
}

double nonclassicality(const WignerGrid& w) {
  double norm = w.integral();
  if (std::fabs(norm - 1) > 0.05)
    throw InputError("nonclassicality: grid not normalized (integral " + std::to_string(norm) + ")");
  double ip = 0, im = 0;
  for (std::size_t i = 0; i < w.values.size(); ++i) {
    double v = w.values[i];
    if (v > 0)
      ip += v * w.weights[i];
    else if (v < -1e-9)
      im -= v * w.weights[i];
  }
  return 1 - (ip - im) / (ip + im);
}

std::vector<Hill> find_hills(const WignerGrid& w, double threshold) {
  const int n1 = static_cast<int>(w.n1()), n2 = static_cast<int>(w.n2());
  const bool sph = w.geometry == Geometry::spherical;
  double vmax = *std::max_element(w.values.begin(), w.values.end());
  auto val = [&](int i, int k) { return w.values[static_cast<std::size_t>(i) * n2 + k]; };
  auto wrap = [&](int k) { return sph ? (k + n2) % n2 : k; };
  std::vector<Hill> hills;
  for (int i = 0; i < n1; ++i)
    for (int k = 0; k < n2; ++k) {
      double v = val(i, k);
      if (v < threshold * vmax) continue;
      bool peak = true;
      auto beats = [&](int ii, int kk) {
        if (ii == i && kk == k) return;
        double u = val(ii, kk);
        // ties go to the lower flat index
        long self = static_cast<long>(i) * n2 + k, other = static_cast<long>(ii) * n2 + kk;
        if (u > v || (u == v && other < self)) peak = false;
      };
      for (int di = -1; di <= 1 && peak; ++di)
        for (int dk = -1; dk <= 1 && peak; ++dk) {
          int ii = i + di, kk = wrap(k + dk);
          if (ii < 0 || ii >= n1 || kk < 0 || kk >= n2) continue;
          beats(ii, kk);
        }
      // rows next to a pole all touch the pole
      if (sph && (i == 0 || i == n1 - 1))
        for (int kk = 0; kk < n2 && peak; ++kk) beats(i, kk);
      if (!peak) continue;

      // parabolic refinement along each axis
      auto refine = [](double a, double b, double c) {
        double den = a - 2 * b + c;
        return den < 0 ? std::clamp(0.5 * (a - c) / den, -0.5, 0.5) : 0.0;
      };
      double a1 = w.axis1[i], a2 = w.axis2[k];
      if (i > 0 && i < n1 - 1) {
        double off = refine(val(i - 1, k), v, val(i + 1, k));
        a1 += off * (off > 0 ? w.axis1[i + 1] - a1 : a1 - w.axis1[i - 1]);
      }
      if (sph || (k > 0 && k < n2 - 1)) {
        double off = refine(val(i, wrap(k - 1)), v, val(i, wrap(k + 1)));
        double step = w.axis2.size() > 1 ? w.axis2[1] - w.axis2[0] : 0;
        a2 += off * step;
      }
      hills.push_back({a1, a2, v});
    }
  std::sort(hills.begin(), hills.end(), [](const Hill& a, const Hill& b) { return a.height > b.height; });
  return hills;
}

Direction sphere_point(double theta, double phi) {
  return {std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi), std::cos(theta)};
}

double angle_between(const Direction& a, const Direction& b) {
  double d = a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
  return std::acos(std::clamp(d, -1.0, 1.0));
}

CapRange cap_range(const WignerGrid& w, const Direction& center, double radius) {
  if (w.geometry != Geometry::spherical) throw InputError("cap_range: planar grid");
  CapRange r{INFINITY, -INFINITY, 0};
  for (std::size_t i = 0; i < w.n1(); ++i)
    for (std::size_t k = 0; k < w.n2(); ++k) {
      if (angle_between(sphere_point(w.axis1[i], w.axis2[k]), center) > radius) continue;
      double v = w.at(i, k);
      r.min = std::min(r.min, v);
      r.max = std::max(r.max, v);
      ++r.nodes;
    }
  if (r.nodes == 0) throw InputError("cap_range: no grid node inside the cap");
  return r;
}

EdgeContrast edge_contrast(const WignerGrid& w, const std::array<Direction, 4>& vertices, double cap_radius,
                           double search_radius, double hill_threshold) {
  if (w.geometry != Geometry::spherical) throw InputError("edge_contrast: planar grid");
  EdgeContrast e;
  auto hills = find_hills(w, hill_threshold);
  double mean = 0;
  for (int q = 0; q < 4; ++q) {
    e.lobes[q] = vertices[q];
    for (const Hill& h : hills) {  // sorted by height
      Direction d = sphere_point(h.a1, h.a2);
      if (angle_between(d, vertices[q]) <= search_radius) {
        e.lobes[q] = d;
        e.lobe_height[q] = h.height;
        e.lobe_found[q] = true;
        break;
      }
    }
    mean += e.lobe_height[q] / 4;
  }
  if (!(mean > 0)) throw NumericalError("edge_contrast: no lobe found");
  for (int k = 0; k < 6; ++k) {
    const Direction &a = e.lobes[EdgeContrast::edges[k][0]], &b = e.lobes[EdgeContrast::edges[k][1]];
    Direction m{a[0] + b[0], a[1] + b[1], a[2] + b[2]};
    double n = std::sqrt(m[0] * m[0] + m[1] * m[1] + m[2] * m[2]);
    for (double& x : m) x /= n;
    CapRange c = cap_range(w, m, cap_radius);
    e.contrast[k] = (c.max - c.min) / mean;
  }
  return e;
}

void write_grid(const std::string& path, const WignerGrid& w) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path);
  const bool sph = w.geometry == Geometry::spherical;
  out << std::setprecision(17);
  out << "# geometry=" << (sph ? "spherical" : "planar") << " n1=" << w.n1() << " n2=" << w.n2()
      << " a1_min=" << w.axis1.front() << " a1_max=" << w.axis1.back() << " a2_min=" << w.axis2.front()
      << " a2_max=" << w.axis2.back() << "\n";
  out << (sph ? "theta,phi,W,weight\n" : "x,p,W,weight\n");
  for (std::size_t i = 0; i < w.n1(); ++i)
    for (std::size_t k = 0; k < w.n2(); ++k) {
      std::size_t idx = i * w.n2() + k;
      out << w.axis1[i] << "," << w.axis2[k] << "," << w.values[idx] << "," << w.weights[idx] << "\n";
    }
}

WignerGrid read_grid(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot read " + path);
  std::string line;
  std::getline(in, line);
  WignerGrid w;
  std::size_t n1 = 0, n2 = 0;
  {
    std::istringstream hs(line.substr(1));
    std::string tok;
    while (hs >> tok) {
      auto eq = tok.find('=');
      if (eq == std::string::npos) continue;
      std::string key = tok.substr(0, eq), v = tok.substr(eq + 1);
      if (key == "geometry") w.geometry = v == "spherical" ? Geometry::spherical : Geometry::planar;
      if (key == "n1") n1 = std::stoul(v);
      if (key == "n2") n2 = std::stoul(v);
    }
  }
  if (n1 == 0 || n2 == 0) throw InputError(path + ": malformed grid header");
  std::getline(in, line);
  w.axis1.resize(n1);
  w.axis2.resize(n2);
  w.values.resize(n1 * n2);
  w.weights.resize(n1 * n2);
  for (std::size_t idx = 0; idx < n1 * n2; ++idx) {
    if (!std::getline(in, line)) throw InputError(path + ": truncated grid");
    double a, b, v, wt;
    char c;
    std::istringstream ls(line);
    if (!(ls >> a >> c >> b >> c >> v >> c >> wt)) throw InputError(path + ": bad row " + line);
    w.axis1[idx / n2] = a;
    w.axis2[idx % n2] = b;
    w.values[idx] = v;
    w.weights[idx] = wt;
  }
  return w;
}

}  // namespace decolab::phase
