#include <doctest.h>

#include <algorithm>

#include <cmath>
#include <filesystem>
#include <numbers>

#include "decolab/morse.hpp"
#include "decolab/special.hpp"

using namespace decolab;
using namespace decolab::morse;

namespace {

const MorseBasis& no_basis() {
  static const MorseBasis b = build_basis(molecule("NO"));
  return b;
}

// Simpson quadrature on the basis grid
double simpson(const std::vector<double>& f, double dx) {
  double s = f.front() + f.back();
  for (std::size_t i = 1; i + 1 < f.size(); ++i) s += (i % 2 ? 4 : 2) * f[i];
  return s * dx / 3;
}

}  // namespace

TEST_CASE("bound spectrum of the NO molecule") {
  const auto& b = no_basis();
  REQUIRE(b.n_bound == 55);
  CHECK(b.params.n_bound() == 55);
  for (int n = 0; n < 55; ++n) {
    const double exact = -(54.54 - n) * (54.54 - n);
    CHECK(std::abs(b.energies[n] - exact) <= 1e-6 * std::abs(exact));
  }
  CHECK(b.energies[55] > 0);
}

TEST_CASE("grid eigenvectors agree with the analytic bound states") {
  const auto& b = no_basis();
  const auto& g = b.grid;
  for (int n : {0, 1, 10, 30, 50}) {
    std::vector<double> prod(g.points), sq(g.points);
    for (int i = 0; i < g.points; ++i) {
      const double a = bound_wavefunction(n, b.params, g.x(i));
      prod[i] = a * b.eigenvectors(i, n);
      sq[i] = a * a;
    }
    INFO("n = " << n);
    CHECK(simpson(sq, g.dx()) == doctest::Approx(1).epsilon(1e-8));
    CHECK(simpson(prod, g.dx()) == doctest::Approx(1).epsilon(1e-6));
  }
}

TEST_CASE("label map round trip") {
  for (double x0 : {-0.3, 0.06, 0.5, 2.0})
    for (double p0 : {-12.0, 0.0, 7.5}) {
      auto pt = point_of(beta_of({x0, p0}, 54.54), 54.54);
      CHECK(pt.x0 == doctest::Approx(x0).epsilon(1e-12));
      CHECK(pt.p0 == doctest::Approx(p0).epsilon(1e-12));
    }
  CHECK(std::abs(beta_of({0, 0}, 54.54)) < 1e-15);
}

TEST_CASE("closed-form coherent coefficients match grid projection") {
  const auto& b = no_basis();
  for (double x0 : {0.06, 0.5, 1.0}) {
    auto cs = coherent_state({x0, 3.0}, b);
    CVec closed = coherent_bound_closed_form(cs.beta, b.params);
    CVec grid = cs.state.coeffs.head(55) * cs.captured_norm;
    INFO("x0 = " << x0);
    CHECK((closed - grid).cwiseAbs().maxCoeff() < 1e-8);
    CHECK(closed.norm() == doctest::Approx(1).epsilon(1e-9));
    CHECK(cs.dissociation_weight < 1e-12);
  }
}

TEST_CASE("coherent state centroid sits at the label plus the offset") {
  const auto& b = no_basis();
  auto ops = observables(b);
  for (double x0 : {0.06, 0.5, 1.0}) {
    auto cs = coherent_state({x0, 0}, b);
    auto [x, p] = expectation_xp(cs.state, ops);
    CHECK(x == doctest::Approx(x0 + label_offset(54.54)).epsilon(1e-7));
    CHECK(std::abs(p) < 1e-8);
  }
  // ln(2s+1) - psi(2s) -> 1/(4s) for large s
  CHECK(label_offset(54.54) == doctest::Approx(1 / (4 * 54.54)).epsilon(0.02));
}

TEST_CASE("position and momentum matrices") {
  const auto& b = no_basis();
  auto ops = observables(b);
  CHECK((ops.X - ops.X.transpose()).cwiseAbs().maxCoeff() < 1e-14);
  CHECK((ops.P - ops.P.adjoint()).cwiseAbs().maxCoeff() < 1e-12);
  // Ehrenfest at t = 0: d<X>/dt = 2 omega_scale <P>, checked by finite difference
  auto cs = coherent_state({0.5, 6.0}, b);
  const double h = 1e-4;
  const double xp = expectation_xp(evolve_free(cs.state, b, h), ops).first;
  const double xm = expectation_xp(evolve_free(cs.state, b, -h), ops).first;
  const double p = expectation_xp(cs.state, ops).second;
  CHECK((xp - xm) / (2 * h) == doctest::Approx(2 * b.params.omega_scale() * p).epsilon(1e-5));
}

TEST_CASE("free evolution is unitary and periodic in the ground-state phase") {
  const auto& b = no_basis();
  auto cs = coherent_state({1.0, 0}, b);
  for (double t : {0.3, 17.0, 110.0}) {
    auto st = evolve_free(cs.state, b, t);
    CHECK(st.coeffs.norm() == doctest::Approx(1).epsilon(1e-13));
  }
  CHECK(autocorrelation(cs.state, b.energies, b.params.omega_scale(), 0) == doctest::Approx(1).epsilon(1e-13));
  StateVector other{"elsewhere", cs.state.coeffs};
  CHECK_THROWS_AS(evolve_free(other, b, 1.0), InputError);
}

TEST_CASE("Bohr spectrum families and revival") {
  const auto& b = no_basis();
  auto cs = coherent_state({0.5, 0}, b);
  auto lines = bohr_spectrum(cs.state, b.energies, position_matrix(b), b.params.s);
  auto [f1, w1] = family_centroid(lines, 1);
  auto [f2, w2] = family_centroid(lines, 2);
  CHECK(f1 > 0.85);
  CHECK(f1 < 0.95);
  CHECK(f2 == doctest::Approx(2 * f1).epsilon(0.02));
  CHECK(w1 > w2);
  auto r = find_revival(cs.state, b.energies, b.params.omega_scale(), 100, 120);
  // the n^2 part of -(s-n)^2 rephases at t = 2s+1
  CHECK(r.time == doctest::Approx(2 * 54.54 + 1).epsilon(2e-3));
  CHECK(r.autocorrelation > 0.99);

  // the two-component epoch is centred on a quarter of the revival time
  auto prof = second_harmonic_profile(cs.state, b.energies, position_matrix(b), b.params.s, f1, 10, 50, 4);
  CHECK(prof.peak_time == doctest::Approx(r.time / 4).epsilon(0.05));
  auto it = std::max_element(prof.ratio.begin(), prof.ratio.end());
  CHECK(*it > 0.9);
  CHECK(prof.ratio.front() < 0.1);
  CHECK(prof.ratio.back() < 0.1);
}

TEST_CASE("basis save and load") {
  MorseParams p;
  p.s = 10.3;
  GridSpec g{-2, 12, 256};
  auto b = build_basis(p, g, 20);
  auto dir = std::filesystem::temp_directory_path() / "decolab_basis_test";
  std::filesystem::create_directories(dir);
  save_basis(b, (dir / "b.json").string(), (dir / "b.csv").string());
  auto c = load_basis((dir / "b.json").string(), (dir / "b.csv").string());
  CHECK(c.id() == b.id());
  CHECK((c.energies - b.energies).cwiseAbs().maxCoeff() < 1e-14);
  CHECK((c.eigenvectors - b.eigenvectors).cwiseAbs().maxCoeff() < 1e-14);
  std::filesystem::remove_all(dir);
}

TEST_CASE("input errors") {
  MorseParams p;
  CHECK_THROWS_AS(bound_wavefunction(60, p, 0.0), InputError);
  CHECK_THROWS_AS(coherent_bound_closed_form(cplx(1.2, 0), p), InputError);
}
