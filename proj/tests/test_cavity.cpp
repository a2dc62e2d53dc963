#include <doctest.h>

#include <cmath>
#include <numbers>

#include "decolab/cavity.hpp"

using namespace decolab;
using namespace decolab::cavity;

namespace {

constexpr double pi = std::numbers::pi;

cplx inner(const ProtocolState& a, const ProtocolState& b) { return a.sym.dot(b.sym) + a.sub.dot(b.sub); }

}  // namespace

TEST_CASE("block structure") {
  auto s2 = build_system(2, 30, 3);
  CHECK(s2.sym.dim_atom == 3);
  CHECK(s2.sub.dim_atom == 1);
  // singlet: V vanishes, H is the bare photon energy
  for (int n = 0; n <= 3; ++n) CHECK(s2.sub.H(n, n) == doctest::Approx(30.0 * n));
  CHECK((s2.sub.H - RMat(s2.sub.H.diagonal().asDiagonal())).cwiseAbs().maxCoeff() == 0);

  auto s4 = build_system(4, 30, 3);
  CHECK(s4.sym.dim_atom == 5);
  CHECK(s4.sub.dim_atom == 3);
  CHECK(excitation_commutator(s4) < 1e-12);
  CHECK(excitation_commutator(build_system(9, 7, 6)) < 1e-12);
  CHECK_FALSE(s4.weak_coupling_warning);
  CHECK(build_system(30, 10, 3).weak_coupling_warning);
  CHECK_THROWS_AS(build_system(1, 30, 3), InputError);
  CHECK_THROWS_AS(build_system(4, 0, 3), InputError);
}

TEST_CASE("initial state weights") {
  auto s2 = build_system(2, 30, 3);
  auto i2 = initial_state(s2, 0);
  CHECK(std::norm(i2.sym[s2.index(1, 0)]) == doctest::Approx(0.5));
  CHECK(std::norm(i2.sub[s2.index(0, 0)]) == doctest::Approx(0.5));
  auto s100 = build_system(100, 30, 2);
  auto i100 = initial_state(s100, 0);
  CHECK(std::abs(i100.sym[s100.index(1, 0)]) == doctest::Approx(0.1));
  CHECK(i100.norm() == doctest::Approx(1));
  // control gets everything, the others nothing
  auto pa = product_amplitudes(s100, i100);
  CHECK(std::abs(pa.control) == doctest::Approx(1));
  CHECK(std::abs(pa.other) < 1e-15);
  CHECK_THROWS_AS(initial_state(s2, 2), InputError);
}

TEST_CASE("perturbative prediction") {
  auto p2 = perturbative_prediction(2, 30);
  CHECK(p2.alpha * p2.t_m == doctest::Approx(pi / 4));
  CHECK(p2.phi == doctest::Approx(pi / 2));
  auto big = perturbative_prediction(100000, 30);
  CHECK(big.alpha * big.t_m == doctest::Approx(pi / 6).epsilon(1e-5));
  double prev = 1e300;
  for (int N = 2; N <= 100; ++N) {
    double t = perturbative_prediction(N, 30).t_m;
    CHECK(t < prev);
    prev = t;
  }
}

TEST_CASE("exact evolution") {
  // g = 0: only photon phases
  auto s0 = build_system(5, 30, 3, 0.0);
  auto i0 = initial_state(s0, 1);
  auto e0 = evolve_exact(s0, i0, 2.7);
  CHECK(std::norm(e0.sym[s0.index(1, 1)]) == doctest::Approx(0.2));
  CHECK(std::norm(e0.sub[s0.index(0, 1)]) == doctest::Approx(0.8));
  CHECK(std::abs(fidelity_subradiant(s0, subradiant_state(s0, 0)) - 1) < 1e-15);

  // N = 2 against the two-state rotation: the symmetric part picks up
  // exp(i N g^2 t / Delta), the singlet part stays put
  auto s = build_system(2, 30, 3);
  auto ini = initial_state(s, 0);
  auto pr = perturbative_prediction(2, 30);
  const double e0i = energy(s, ini);
  for (int k = 0; k <= 40; ++k) {
    const double t = (2 * pi / pr.alpha) * k / 40;
    auto ex = evolve_exact(s, ini, t);
    ProtocolState pt = initial_state(s, 0);
    pt.sym[s.index(1, 0)] *= std::polar(1.0, 2 * pr.alpha * t);
    CHECK(std::norm(inner(pt, ex)) > 0.99);
    CHECK(ex.norm() == doctest::Approx(1).epsilon(1e-12));
    CHECK(energy(s, ex) == doctest::Approx(e0i).epsilon(1e-10));
  }
}

TEST_CASE("other-atom amplitude follows 2|sin(alpha t)|/N") {
  for (int N : {3, 6, 10}) {
    auto s = build_system(N, 100, 3);
    const double a = dressed_gap(s, 0) / 2;
    auto ini = initial_state(s, 0);
    for (int k = 0; k <= 20; ++k) {
      const double t = (pi / a) * k / 20;
      auto pa = product_amplitudes(s, evolve_exact(s, ini, t));
      CHECK(std::abs(std::abs(pa.other) - 2 * std::abs(std::sin(a * t)) / N) < 5e-3);
    }
  }
}

TEST_CASE("dressed gap on the vacuum rung") {
  for (int N : {2, 6, 10, 20})
    for (double dg : {10.0, 30.0, 100.0}) {
      auto s = build_system(N, dg, 4);
      // two-level mixing of |1>|0> with |G>|1>: (sqrt(D^2 + 4 N g^2) - D)/2
      const double exact = (std::sqrt(dg * dg + 4.0 * N) - dg) / 2;
      CHECK(dressed_gap(s, 0) == doctest::Approx(exact).epsilon(1e-12));
      const double pert = 2 * perturbative_prediction(N, dg).alpha;
      CHECK(std::abs(dressed_gap(s, 0) - pert) / pert < 2.0 * N / (dg * dg));
    }
}

TEST_CASE("distance and kick") {
  auto s = build_system(6, 30, 3);
  auto ini = initial_state(s, 0);
  // at t = 0 the state is the control excitation alone
  const double N = 6;
  CHECK(target_distance(s, ini) == doctest::Approx(std::sqrt(2 - 2 * std::sqrt((N - 1) / N))).epsilon(1e-12));

  auto pr = perturbative_prediction(6, 30);
  auto tm = find_tm_exact(s, ini, 2 * pr.t_m);
  CHECK(tm.min_distance < 0.04);
  auto at = evolve_exact(s, ini, tm.t_m);
  CHECK(std::abs(target_phase(s, at)) == doctest::Approx(pr.phi).epsilon(0.05));

  auto same = phase_kick(s, at, 0);
  CHECK(std::norm(inner(same, at)) == doctest::Approx(1).epsilon(1e-14));
  CHECK(same.leaked_norm == 0);

  auto k = phase_kick(s, at, -target_phase(s, at));
  CHECK(fidelity_subradiant(s, k) > 0.96);
  CHECK(k.norm() * k.norm() + k.leaked_norm == doctest::Approx(1).epsilon(1e-12));

  // phi then -phi restores the single-excitation rung
  auto back = phase_kick(s, phase_kick(s, at, 1.1), -1.1);
  CHECK(std::abs(back.sym[s.index(1, 0)] - at.sym[s.index(1, 0)]) < 1e-12);
  CHECK(std::abs(back.sub[s.index(0, 0)] - at.sub[s.index(0, 0)]) < 1e-12);
  CHECK_THROWS_AS(find_tm_exact(s, ini, pr.t_m), InputError);
}

TEST_CASE("subradiance") {
  auto s = build_system(10, 30, 3);
  auto pr = perturbative_prediction(10, 30);
  auto rep = subradiance_check(s, subradiant_state(s, 0), 10 * pr.t_m);
  CHECK(rep.min_fidelity > 0.99);
  CHECK(rep.within_bound);
  // vacuum rung: |2>|0> is an exact eigenstate
  CHECK(rep.min_fidelity == doctest::Approx(1).epsilon(1e-12));
  auto one = subradiance_check(s, subradiant_state(s, 1), 10 * pr.t_m);
  // one photon: Rabi mixing with the M + 1 neighbour, V^2 = 2J n with J = N/2 - 1
  const double V2 = 2 * 4.0 * 1;
  CHECK(1 - one.min_fidelity == doctest::Approx(4 * V2 / (900 + 4 * V2)).epsilon(0.02));
  auto s0 = build_system(10, 30, 3, 0.0);
  auto r0 = subradiance_check(s0, subradiant_state(s0, 1), 5.0);
  CHECK(r0.min_fidelity == doctest::Approx(1).epsilon(1e-14));
}

TEST_CASE("field independence") {
  auto s = build_system(4, 30, 5);
  auto vac = field_independence_test(s, {1.0});
  auto base = find_tm_exact(s, initial_state(s, 0), 2 * perturbative_prediction(4, 30).t_m);
  REQUIRE(vac.sectors.size() == 1);
  CHECK(vac.sectors[0].t_m == doctest::Approx(base.t_m).epsilon(1e-9));
  CHECK(vac.t_m_mixture == doctest::Approx(base.t_m).epsilon(1e-5));
  const double w = 1 / std::sqrt(3.0);
  auto mix = field_independence_test(s, {w, w, w});
  CHECK(mix.sectors.size() == 3);
  CHECK(std::abs(mix.t_m_mixture - base.t_m) / base.t_m < 0.02);
  for (const auto& sc : mix.sectors) {
    auto st = evolve_exact(s, initial_state(s, sc.photons), sc.t_m);
    CHECK(st.norm() == doctest::Approx(1).epsilon(1e-12));
  }
  CHECK_THROWS_AS(field_independence_test(s, {0.5, 0.5}), InputError);
}

TEST_CASE("protocol report") {
  auto r = run_protocol(5, 30);
  CHECK(r.N == 5);
  CHECK(r.min_distance < 0.04);
  CHECK(r.fidelity_post_kick > 0.96);
  CHECK(r.leaked_norm == 0);
  CHECK(report_json(r).find("\"t_m_exact\"") != std::string::npos);
  // boundary regime still returns a minimum
  auto weak = run_protocol(10, 3);
  CHECK(weak.weak_coupling_warning);
  CHECK(std::isfinite(weak.min_distance));
}
