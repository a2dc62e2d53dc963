#pragma once

#include <array>
#include <string>
#include <vector>

#include "decolab/morse.hpp"
#include "decolab/types.hpp"

namespace decolab::phase {

enum class Geometry { planar, spherical };

// values are row-major over (axis1, axis2): (x, p) or (theta, phi).
struct WignerGrid {
  Geometry geometry = Geometry::planar;
  std::vector<double> axis1, axis2;
  std::vector<double> values;
  std::vector<double> weights;
  double imag_residue = 0;

  std::size_t n1() const { return axis1.size(); }
  std::size_t n2() const { return axis2.size(); }
  double at(std::size_t i, std::size_t k) const { return values[i * axis2.size() + k]; }
  double integral() const;
};

// x nodes are snapped to the wavefunction grid; the x spacing is an integer
// multiple of the grid spacing close to (x_max - x_min) / (nx - 1).
struct PlanarSpec {
  double x_min = -1.5, x_max = 2.5;
  int nx = 256;
  double p_min = -40, p_max = 40;
  int np = 256;
};

// W(x,p) = 1/(2 pi) int phi*(x+u/2) phi(x-u/2) e^{iup} du
WignerGrid wigner_planar_pure(const CVec& psi, const morse::GridSpec& grid, const PlanarSpec& spec);
// rho given in position representation on the grid (points x points).
WignerGrid wigner_planar_mixed(const CMat& rho_x, const morse::GridSpec& grid, const PlanarSpec& spec);
// rho in the Morse eigenbasis; the position representation is never formed.
WignerGrid wigner_planar_mixed(const CMat& rho, const morse::MorseBasis& basis, const PlanarSpec& spec);

// Clebsch-Gordan coefficient <j1 m1; j2 m2 | J M>.
double clebsch_gordan(double j1, double m1, double j2, double m2, double J, double M);

// <j m'|T_KQ|j m> = sqrt((2K+1)/(2j+1)) <j m; K Q | j m'>
RMat multipole_operator(int K, int Q, double j);
// Tr(rho T_KQ^dagger)
cplx multipole_moment(const CMat& rho, int K, int Q, double j);

struct SphericalSpec {
  int n_theta = 0;  // 0: 2j+2 Gauss-Legendre nodes in cos(theta)
  int n_phi = 0;    // 0: 4j+4 uniform nodes
};

WignerGrid wigner_spherical(const CMat& rho, double j, const SphericalSpec& spec = {});
// Point evaluation with the same kernel.
double wigner_spherical_at(const CMat& rho, double j, double theta, double phi);
// Multipole projection of a grid back to rho; exact when the grid integrates
// polynomials of degree 4j.
CMat spherical_inverse(const WignerGrid& w, double j);

// 1 - (I+ - I-)/(I+ + I-) with the grid weights.
double nonclassicality(const WignerGrid& w);

struct Hill {
  double a1, a2;  // (x, p) or (theta, phi)
  double height;
};
std::vector<Hill> find_hills(const WignerGrid& w, double threshold);

using Direction = std::array<double, 3>;
Direction sphere_point(double theta, double phi);
// Geodesic angle between unit vectors.
double angle_between(const Direction& a, const Direction& b);

struct CapRange {
  double min = 0, max = 0;
  int nodes = 0;
};
// Extremes of W over the nodes within `radius` (radians) of `center`.
CapRange cap_range(const WignerGrid& w, const Direction& center, double radius);

// Four-lobe state: each lobe is the highest hill within search_radius of its
// reference vertex. Edge contrast = (max - min) of W in a cap around the
// midpoint of the two current lobe directions, over the mean lobe height.
// Edges are ordered (0,1), (2,3), (0,2), (0,3), (1,2), (1,3).
struct EdgeContrast {
  std::array<Direction, 4> lobes;
  std::array<double, 4> lobe_height{};
  std::array<bool, 4> lobe_found{};
  std::array<double, 6> contrast{};
  static constexpr int edges[6][2] = {{0, 1}, {2, 3}, {0, 2}, {0, 3}, {1, 2}, {1, 3}};
};
EdgeContrast edge_contrast(const WignerGrid& w, const std::array<Direction, 4>& vertices, double cap_radius = 0.3,
                           double search_radius = 0.5, double hill_threshold = 0.05);

// Grid file: '#' header with geometry, ranges and counts, then "x,p,W" or "theta,phi,W" rows.
void write_grid(const std::string& path, const WignerGrid& w);
WignerGrid read_grid(const std::string& path);

}  // namespace decolab::phase
