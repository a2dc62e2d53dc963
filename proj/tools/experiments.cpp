#include "experiments.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <numbers>
#include <sstream>

#include "decolab/cavity.hpp"
#include "decolab/lindblad.hpp"
#include "decolab/metrics.hpp"
#include "decolab/morse.hpp"
#include "decolab/phase_space.hpp"
#include "decolab/spin.hpp"

namespace decolab::cli {

namespace {

namespace fs = std::filesystem;

std::string tag(double t) {
  std::ostringstream s;
  s << std::setprecision(6) << t;
  return s.str();
}

json num_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

struct Out {
  std::string dir;
  RunResult& res;

  std::string path(const std::string& name) {
    res.files.push_back(name);
    return (fs::path(dir) / name).string();
  }
  void text(const std::string& name, const std::string& body) {
    std::ofstream f(path(name));
    if (!f) throw InputError("cannot write " + name);
    f << body;
  }
  void json_file(const std::string& name, const json& j) { text(name, j.dump(2) + "\n"); }
};

// Union of the grids, ascending; flags[i] tells which grid each time came from.
std::vector<double> merge_grids(const std::vector<std::vector<double>>& grids,
                                std::vector<std::vector<bool>>& flags) {
  std::vector<double> all;
  for (const auto& g : grids) all.insert(all.end(), g.begin(), g.end());
  std::sort(all.begin(), all.end());
  all.erase(std::unique(all.begin(), all.end(), [](double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(a)); }),
            all.end());
  flags.assign(grids.size(), std::vector<bool>(all.size(), false));
  for (std::size_t g = 0; g < grids.size(); ++g)
    for (double t : grids[g]) {
      auto it = std::lower_bound(all.begin(), all.end(), t - 1e-12 * std::max(1.0, std::abs(t)));
      flags[g][it - all.begin()] = true;
    }
  return all;
}

json knee_to_json(const metrics::KneeReport& k) { return json::parse(metrics::knee_json(k)); }

morse::MorseBasis morse_basis(const json& p, const json& n) {
  morse::MorseParams mp;
  mp.s = p["s"];
  mp.label = "s=" + tag(mp.s);
  morse::GridSpec g;
  g.x_min = n["grid"]["x_min"];
  g.x_max = n["grid"]["x_max"];
  g.points = n["grid"]["points"];
  return morse::build_basis(mp, g, n["n_basis"]);
}

phase::PlanarSpec planar_spec(const json& w) {
  phase::PlanarSpec s;
  s.x_min = w["x_min"];
  s.x_max = w["x_max"];
  s.nx = w["nx"];
  s.p_min = w["p_min"];
  s.p_max = w["p_max"];
  s.np = w["np"];
  return s;
}

json hills_json(const std::vector<phase::Hill>& hills) {
  json a = json::array();
  for (const auto& h : hills) a.push_back({h.a1, h.a2, h.height});
  return a;
}

// ---------------------------------------------------------------- morse-free

void morse_free(const ExperimentConfig& cfg, Out& out) {
  const json& p = cfg.params;
  auto basis = morse_basis(p, cfg.numerics);
  const double w = basis.params.omega_scale();
  const auto ops = morse::observables(basis);
  const auto times = time_spec(p["times"]).values;
  auto spec = planar_spec(cfg.numerics["wigner"]);

  std::vector<std::string> names;
  std::vector<std::vector<double>> xcols, mcols;
  json states = json::array();
  int k = 0;
  for (const auto& pt : p["points"]) {
    morse::PhasePoint point{pt[0].get<double>(), pt[1].get<double>()};
    auto cs = morse::coherent_state(point, basis);
    const std::string label = "x0=" + tag(point.x0) + (point.p0 != 0 ? ",p0=" + tag(point.p0) : "");
    json st = {{"x0", point.x0},
               {"p0", point.p0},
               {"captured_norm", cs.captured_norm},
               {"dissociation_weight", cs.dissociation_weight},
               {"dissociation_warning", cs.dissociation_warning}};

    std::vector<double> xs;
    for (double t : times) xs.push_back(morse::expectation_xp(morse::evolve_free(cs.state, basis.energies, w, t), ops).first);
    names.push_back("X[" + label + "]");
    xcols.push_back(std::move(xs));

    if (p["bohr_spectrum"].get<bool>()) {
      auto lines = morse::bohr_spectrum(cs.state, basis.energies, ops.X, basis.params.s);
      std::ostringstream s;
      s << "frequency,weight,order\n" << std::setprecision(12);
      double f_max = 0;
      for (const auto& l : lines) {
        s << l.frequency << "," << l.weight << "," << l.order << "\n";
        f_max = std::max(f_max, l.frequency);
      }
      out.text("bohr_lines_" + std::to_string(k) + ".csv", s.str());
      std::ostringstream b;
      b << "frequency,weight\n" << std::setprecision(12);
      for (const auto& [f, wt] : morse::bin_spectrum(lines, p["bin_width"], f_max + p["bin_width"].get<double>()))
        b << f << "," << wt << "\n";
      out.text("bohr_binned_" + std::to_string(k) + ".csv", b.str());
      json fam = json::array();
      for (int order = 1; order <= 3; ++order) {
        auto [c, wt] = morse::family_centroid(lines, order);
        fam.push_back({{"order", order}, {"centroid", num_or_null(c)}, {"weight", wt}});
      }
      st["families"] = fam;
    }
    if (p.contains("revival_window")) {
      const auto& rw = p["revival_window"];
      if (rw.size() != 2) throw InputError("revival_window: need [t_lo, t_hi]");
      auto r = morse::find_revival(cs.state, basis.energies, w, rw[0], rw[1]);
      st["revival"] = {{"time", r.time}, {"autocorrelation", r.autocorrelation}};
    }
    if (p["nonclassicality"].get<bool>()) {
      std::vector<double> m;
      for (double t : times) {
        auto psi = morse::wavefunction(morse::evolve_free(cs.state, basis.energies, w, t), basis);
        m.push_back(phase::nonclassicality(phase::wigner_planar_pure(psi, basis.grid, spec)));
      }
      mcols.push_back(std::move(m));
    }
    if (p.contains("wigner_times")) {
      json snaps = json::array();
      for (double t : time_spec(p["wigner_times"]).values) {
        auto psi = morse::wavefunction(morse::evolve_free(cs.state, basis.energies, w, t), basis);
        auto grid = phase::wigner_planar_pure(psi, basis.grid, spec);
        const std::string f = "wigner_" + std::to_string(k) + "_t" + tag(t) + ".csv";
        phase::write_grid(out.path(f), grid);
        snaps.push_back({{"t", t},
                         {"file", f},
                         {"integral", grid.integral()},
                         {"nonclassicality", phase::nonclassicality(grid)},
                         {"hills", hills_json(phase::find_hills(grid, 0.1))}});
      }
      st["wigner"] = snaps;
    }
    states.push_back(st);
    ++k;
  }
  lindblad::write_trajectory_csv(out.path("xexp.csv"), times, names, xcols);
  if (!mcols.empty()) {
    std::vector<std::string> mn;
    for (const auto& n : names) mn.push_back("M_nc" + n.substr(1));
    lindblad::write_trajectory_csv(out.path("nonclassicality.csv"), times, mn, mcols);
  }
  out.res.summary = {{"basis", basis.id()}, {"n_bound", basis.n_bound}, {"states", states}};
}

// ---------------------------------------------------------- morse-decoherence

void morse_decoherence(const ExperimentConfig& cfg, Out& out) {
  const json& p = cfg.params;
  const json& n = cfg.numerics;
  auto basis = morse_basis(p, n);
  const double w = basis.params.omega_scale();
  const auto ops = morse::observables(basis);
  const double lam = lindblad::calibrate_lambda(basis.energies, ops.X, w, p["omega_over_gamma"]);
  lindblad::BathSpec bath{p["temperature"].get<double>(), lam, 3};
  auto gen = lindblad::build_anharmonic_generator(basis.energies, ops.X, bath, w);
  const bool secular = p["generator"] == "secular";
  auto G = lindblad::make_generator(gen, secular ? lindblad::AnharmonicMode::secular : lindblad::AnharmonicMode::full);

  json summary = {{"basis", basis.id()}, {"lambda", lam}, {"generator", p["generator"]}};
  StateVector psi;
  const json& init = p["initial"];
  if (init["kind"] == "coherent") {
    auto cs = morse::coherent_state({init["x0"].get<double>(), init["p0"].get<double>()}, basis);
    psi = cs.state;
    summary["dissociation_warning"] = cs.dissociation_warning;
    summary["dissociation_weight"] = cs.dissociation_weight;
  } else {
    const int level = init["n"];
    if (level >= basis.size()) throw InputError("initial.n outside the basis");
    psi.basis_id = basis.id();
    psi.coeffs = CVec::Zero(basis.size());
    psi.coeffs(level) = 1;
  }
  const CMat rho0 = psi.coeffs * psi.coeffs.adjoint();

  const auto times = time_spec(p["times"]).values;
  std::vector<double> wt;
  if (p.contains("wigner_times")) wt = time_spec(p["wigner_times"]).values;
  std::vector<std::vector<bool>> flags;
  const auto all = merge_grids({times, wt}, flags);

  metrics::DiagnosticOptions dop;
  dop.eig_floor = n["eig_floor"];
  metrics::DiagnosticAccumulator acc(basis.energies, dop);
  lindblad::IntegratorOptions io;
  io.tol = n["tol"];
  io.eig_floor = n["eig_floor"];
  auto spec = planar_spec(n["wigner"]);
  const bool portrait = p["phase_portrait"].get<bool>();
  const bool snapshots = p["snapshots"].get<bool>();
  std::vector<double> xs, ps;
  json snaps = json::array();
  std::size_t idx = 0;

  auto stats = lindblad::integrate(G, rho0, all, io, [&](double t, const CMat& rho) {
    const std::size_t i = idx++;
    if (flags[0][i]) {
      acc.add(t, rho);
      if (portrait) {
        xs.push_back((rho * ops.X).trace().real());
        ps.push_back((rho * ops.P).trace().real());
      }
    }
    if (flags[1][i]) {
      auto grid = phase::wigner_planar_mixed(rho, basis, spec);
      const std::string f = "wigner_t" + tag(t) + ".csv";
      phase::write_grid(out.path(f), grid);
      json s = {{"t", t},
                {"file", f},
                {"integral", grid.integral()},
                {"nonclassicality", phase::nonclassicality(grid)},
                {"hills", hills_json(phase::find_hills(grid, 0.1))}};
      if (snapshots) {
        const std::string r = "rho_t" + tag(t) + ".csv";
        lindblad::write_snapshot(out.path(r), rho);
        s["snapshot"] = r;
      }
      snaps.push_back(s);
    }
  });

  const auto& ser = acc.series();
  metrics::write_series_csv(out.path("diagnostics.csv"), ser);
  if (portrait) lindblad::write_trajectory_csv(out.path("portrait.csv"), ser.times, {"X", "P"}, {xs, ps});
  const auto& field = p["knee_field"] == "entropy" ? ser.entropy : ser.linear_entropy;
  if (ser.times.size() >= 6) {
    auto knee = metrics::detect_knee(ser.times, field);
    metrics::write_knee_json(out.path("knee.json"), knee);
    summary["knee"] = knee_to_json(knee);
  }
  summary["wigner"] = snaps;
  summary["steps"] = stats.steps;
  summary["rejected"] = stats.rejected;
  summary["final"] = {{"entropy", ser.entropy.empty() ? 0.0 : ser.entropy.back()},
                      {"purity", ser.purity.back()},
                      {"energy", ser.energy.back()}};
  out.res.summary = summary;
}

// -------------------------------------------------------------- dicke-cat

double thermal_excitations(int dim, double n_bar) {
  if (n_bar <= 0) return 0;
  const double r = n_bar / (n_bar + 1);
  double z = 0, e = 0, q = 1;
  for (int a = 0; a < dim; ++a, q *= r) {
    z += q;
    e += a * q;
  }
  return e / z;
}

// Exponential fit of the excitation excess over [t_from, t_1%], where t_1% is
// the last sample with the excess above 1% of its initial value. NaN when the
// window holds fewer than 3 samples.
double dissipation_time(const std::vector<double>& t, const std::vector<double>& e, double e_inf, double t_from) {
  const double floor = 0.01 * (e.front() - e_inf);
  double t_to = 0;
  for (std::size_t i = 0; i < t.size(); ++i)
    if (e[i] - e_inf >= floor) t_to = t[i];
  int n = 0;
  for (double x : t) n += x >= t_from && x <= t_to;
  if (n < 3) return NAN;
  return metrics::relaxation_time(t, e, t_from, e_inf, t_to);
}

struct CatSetup {
  spin::CoherentLabel a, b;
  CMat rho0, rho_cl;
  double slin_rate = 0, slin_cl = 0, tau_dec = 0;
};

CatSetup cat_setup(const spin::SpinBasis& B, double gamma, double n_bar, double b1, double f1, double b2, double f2) {
  CatSetup c;
  c.a = spin::CoherentLabel::from_angles(b1, f1);
  c.b = spin::CoherentLabel::from_angles(b2, f2);
  c.rho0 = projector(spin::cat2(c.a, c.b, B)).matrix;
  c.rho_cl = spin::classical_mixture(c.a, c.b, B).matrix;
  c.slin_rate = spin::slin_rate_t0(c.rho0, gamma, n_bar, B);
  c.slin_cl = 1 - metrics::purity(c.rho_cl);
  c.tau_dec = c.slin_rate > 0 ? c.slin_cl / c.slin_rate : NAN;
  return c;
}

std::vector<double> scaled(std::vector<double> v, double s) {
  for (auto& x : v) x *= s;
  return v;
}

void dicke_sweep(const ExperimentConfig& cfg, Out& out) {
  const json& p = cfg.params;
  const json& n = cfg.numerics;
  const double j = p["N"].get<int>() / 2.0;
  const double gamma = p["gamma"], n_bar = p["n_bar"];
  spin::SpinBasis B(j);
  auto dg = lindblad::build_dicke_generator(j, gamma, n_bar);
  auto G = lindblad::make_generator(dg);
  const auto ts = time_spec(p["times"]);
  RVec h = RVec::LinSpaced(B.dim(), 0, B.dim() - 1);
  lindblad::IntegratorOptions io;
  io.tol = n["tol"];
  io.eig_floor = n["eig_floor"];

  std::ostringstream csv;
  csv << "beta1,beta2,tau_dec,t_d,ratio,separated\n" << std::setprecision(12);
  json rows = json::array();
  for (const auto& b1 : p["sweep"]["beta1"])
    for (const auto& b2 : p["sweep"]["beta2"]) {
      const double x1 = b1, x2 = b2;
      if (std::abs(x1 - x2) < 1e-12) continue;
      auto c = cat_setup(B, gamma, n_bar, x1, p["cat"]["phi1"], x2, p["cat"]["phi2"]);
      if (!std::isfinite(c.tau_dec)) continue;
      const auto t = ts.unit == "tau_dec" ? scaled(ts.values, c.tau_dec) : ts.values;
      metrics::DiagnosticOptions dop;
      dop.entropy = p["knee_field"] == "entropy";
      dop.eig_floor = n["eig_floor"];
      metrics::DiagnosticAccumulator acc(h, dop);
      lindblad::integrate(G, c.rho0, t, io, [&](double tt, const CMat& rho) { acc.add(tt, rho); });
      const auto& s = acc.series();
      auto k = metrics::detect_knee(s.times, p["knee_field"] == "entropy" ? s.entropy : s.linear_entropy);
      csv << x1 << "," << x2 << "," << c.tau_dec << "," << k.t_d << "," << k.ratio << "," << (k.separated ? 1 : 0)
          << "\n";
      rows.push_back({{"beta1", x1}, {"beta2", x2}, {"tau_dec", c.tau_dec}, {"t_d", k.t_d}, {"separated", k.separated}});
    }
  out.text("decoherence_times.csv", csv.str());
  out.res.summary = {{"N", p["N"]}, {"n_bar", n_bar}, {"points", rows}};
}

void dicke_cat(const ExperimentConfig& cfg, Out& out) {
  const json& p = cfg.params;
  if (p.contains("sweep")) return dicke_sweep(cfg, out);
  const json& n = cfg.numerics;
  const double j = p["N"].get<int>() / 2.0;
  const double gamma = p["gamma"], n_bar = p["n_bar"];
  spin::SpinBasis B(j);
  auto dg = lindblad::build_dicke_generator(j, gamma, n_bar);
  auto G = lindblad::make_generator(dg);
  const json& cat = p["cat"];
  auto c = cat_setup(B, gamma, n_bar, cat["beta1"], cat["phi1"], cat["beta2"], cat["phi2"]);

  json summary = {{"N", p["N"]},
                  {"n_bar", n_bar},
                  {"gamma", gamma},
                  {"overlap", std::abs(spin::overlap(c.a, c.b, j))},
                  {"slin_rate_t0", c.slin_rate},
                  {"slin_classical", c.slin_cl},
                  {"tau_dec", num_or_null(c.tau_dec)},
                  {"entanglement_rate", spin::entanglement_rate(c.rho0, B)}};

  const auto ts = time_spec(p["times"]);
  if (ts.unit == "tau_dec" && !std::isfinite(c.tau_dec))
    throw InputError("times: tau_dec undefined, the state does not decohere");
  const auto knee_t = ts.unit == "tau_dec" ? scaled(ts.values, c.tau_dec) : ts.values;
  std::vector<double> wt, dt;
  if (p.contains("wigner_times")) wt = time_spec(p["wigner_times"]).values;
  if (p.contains("dissipation_times")) {
    auto d = time_spec(p["dissipation_times"]);
    dt = d.unit == "tau_dec" ? scaled(d.values, c.tau_dec) : d.values;
  }
  std::vector<std::vector<bool>> flags;
  const auto all = merge_grids({knee_t, wt, dt}, flags);

  RVec h = RVec::LinSpaced(B.dim(), 0, B.dim() - 1);
  metrics::DiagnosticOptions dop;
  dop.entropy = p["entropy"].get<bool>() || p["knee_field"] == "entropy";
  dop.eig_floor = n["eig_floor"];
  metrics::DiagnosticAccumulator acc(h, dop);
  lindblad::IntegratorOptions io;
  io.tol = n["tol"];
  io.eig_floor = n["eig_floor"];
  phase::SphericalSpec ss{n["sphere"]["n_theta"].get<int>(), n["sphere"]["n_phi"].get<int>()};
  const bool dcl = p["classical_distance"].get<bool>();
  std::vector<double> dist, knee_dist;
  std::vector<std::vector<bool>> knee_mask(1);
  json snaps = json::array();
  std::size_t idx = 0;

  auto stats = lindblad::integrate(G, c.rho0, all, io, [&](double t, const CMat& rho) {
    const std::size_t i = idx++;
    acc.add(t, rho);
    knee_mask[0].push_back(flags[0][i]);
    if (dcl) dist.push_back(spin::distance(rho, c.rho_cl));
    if (flags[1][i]) {
      auto grid = phase::wigner_spherical(rho, j, ss);
      const std::string f = "wigner_t" + tag(t) + ".csv";
      phase::write_grid(out.path(f), grid);
      snaps.push_back({{"t", t}, {"file", f}, {"integral", grid.integral()}, {"hills", hills_json(phase::find_hills(grid, 0.1))}});
    }
  });

  const auto& s = acc.series();
  std::vector<std::string> names{"S_lin", "purity", "excitations"};
  std::vector<std::vector<double>> cols{s.linear_entropy, s.purity, s.energy};
  if (dop.entropy) {
    names.push_back("S");
    cols.push_back(s.entropy);
  }
  if (dcl) {
    names.push_back("D_classical");
    cols.push_back(dist);
  }
  std::vector<double> dref;
  if (p["evolved_reference"].get<bool>()) {
    // The generator is linear, so rho - rho_cl_evolved obeys the same equation.
    lindblad::IntegratorOptions dio = io;
    dio.validate = false;
    lindblad::integrate(G, c.rho0 - c.rho_cl, all, dio,
                        [&](double, const CMat& d) { dref.push_back((d * d).trace().real()); });
    names.push_back("D_evolved_classical");
    cols.push_back(dref);
  }
  lindblad::write_trajectory_csv(out.path("diagnostics.csv"), s.times, names, cols);

  std::vector<double> kt, ky;
  const auto& field = p["knee_field"] == "entropy" ? s.entropy : s.linear_entropy;
  for (std::size_t i = 0; i < s.times.size(); ++i)
    if (knee_mask[0][i]) {
      kt.push_back(s.times[i]);
      ky.push_back(field[i]);
    }
  auto knee = metrics::detect_knee(kt, ky);
  metrics::write_knee_json(out.path("knee.json"), knee);
  summary["knee"] = knee_to_json(knee);
  if (std::isfinite(c.tau_dec)) summary["t_d_over_tau_dec"] = knee.t_d / c.tau_dec;

  const double e_inf = thermal_excitations(B.dim(), n_bar);
  const double t_diss = dissipation_time(s.times, s.energy, e_inf, knee.t_d);
  summary["excitations_thermal"] = e_inf;
  summary["t_diss"] = num_or_null(t_diss);
  summary["t_diss_over_t_d"] = num_or_null(t_diss / knee.t_d);
  if (dcl) {
    // distance at the sample closest to t_d
    std::size_t best = 0;
    for (std::size_t i = 0; i < s.times.size(); ++i)
      if (std::abs(s.times[i] - knee.t_d) < std::abs(s.times[best] - knee.t_d)) best = i;
    summary["D_classical_at_t_d"] = dist[best];
    const auto m = std::min_element(dist.begin(), dist.end()) - dist.begin();
    summary["D_classical_initial"] = dist.front();
    summary["D_classical_min"] = {{"t", s.times[m]}, {"value", dist[m]}};
  }
  if (!dref.empty()) {
    std::size_t best = 0;
    for (std::size_t i = 0; i < s.times.size(); ++i)
      if (std::abs(s.times[i] - knee.t_d) < std::abs(s.times[best] - knee.t_d)) best = i;
    summary["D_evolved_classical_at_t_d"] = dref[best];
  }
  summary["wigner"] = snaps;
  summary["steps"] = stats.steps;
  out.res.summary = summary;
}

// ------------------------------------------------------------ cat4-wigner

void cat4_wigner(const ExperimentConfig& cfg, Out& out) {
  const json& p = cfg.params;
  const json& n = cfg.numerics;
  const double j = p["N"].get<int>() / 2.0;
  spin::SpinBasis B(j);
  auto labels = spin::tetrahedron_labels();
  const CMat rho0 = projector(spin::cat4(labels, B)).matrix;
  auto dg = lindblad::build_dicke_generator(j, p["gamma"], p["n_bar"]);
  auto G = lindblad::make_generator(dg);
  std::array<phase::Direction, 4> verts;
  for (int k = 0; k < 4; ++k) verts[k] = spin::bloch_direction(labels[k]);
  phase::SphericalSpec ss{n["sphere"]["n_theta"].get<int>(), n["sphere"]["n_phi"].get<int>()};
  lindblad::IntegratorOptions io;
  io.tol = n["tol"];
  const double cap = p["cap_radius"];

  json snaps = json::array();
  lindblad::integrate(G, rho0, time_spec(p["times"]).values, io, [&](double t, const CMat& rho) {
    auto grid = phase::wigner_spherical(rho, j, ss);
    const std::string f = "wigner_t" + tag(t) + ".csv";
    phase::write_grid(out.path(f), grid);
    auto ec = phase::edge_contrast(grid, verts, cap);
    json edges = json::array();
    double others = 0;
    for (int e = 0; e < 6; ++e) {
      edges.push_back({{"edge", {phase::EdgeContrast::edges[e][0], phase::EdgeContrast::edges[e][1]}},
                       {"contrast", ec.contrast[e]}});
      if (e > 0) others = std::max(others, ec.contrast[e]);
    }
    json lobes = json::array();
    for (int k = 0; k < 4; ++k)
      lobes.push_back({{"found", ec.lobe_found[k]},
                       {"height", ec.lobe_height[k]},
                       {"drift", phase::angle_between(ec.lobes[k], verts[k])}});
    snaps.push_back({{"t", t},
                     {"file", f},
                     {"integral", grid.integral()},
                     {"lobes", lobes},
                     {"edges", edges},
                     {"z_edge_over_max_other", others > 0 ? json(ec.contrast[0] / others) : json(nullptr)}});
  });
  out.json_file("contrast.json", snaps);
  out.res.summary = {{"N", p["N"]}, {"n_bar", p["n_bar"]}, {"snapshots", snaps}};
}

// -------------------------------------------------------- subradiant-prep

std::vector<cplx> coefficients(const json& a) {
  std::vector<cplx> c;
  for (const auto& x : a) c.push_back(x.is_array() ? cplx(x[0].get<double>(), x[1].get<double>()) : cplx(x.get<double>(), 0));
  return c;
}

json protocol_json(const cavity::ProtocolReport& r) { return json::parse(cavity::report_json(r)); }

void subradiant_prep(const ExperimentConfig& cfg, Out& out) {
  const json& p = cfg.params;
  const double dg = p["delta_over_g"];
  const int photons = p["photons"], n_max = p["n_max"];
  const double hz = p["g_over_2pi_hz"];
  std::vector<cavity::ProtocolReport> rows;
  json reports = json::array();
  bool warned = false;
  for (const auto& a : p["atoms"]) {
    auto r = cavity::run_protocol(a.get<int>(), dg, photons, n_max);
    warned |= r.weak_coupling_warning;
    rows.push_back(r);
    reports.push_back(protocol_json(r));
  }
  cavity::write_sweep_csv(out.path("sweep.csv"), rows);
  json summary = {{"delta_over_g", dg}, {"photons", photons}, {"weak_coupling_warning", warned}, {"reports", reports}};

  if (hz > 0) {
    // time unit 1/g with g = 2pi * hz
    const double us = 1e6 / (2 * std::numbers::pi * hz);
    std::ostringstream s;
    s << "N,t_m_pert_us,t_m_exact_us\n" << std::setprecision(12);
    for (const auto& r : rows) s << r.N << "," << r.t_m_pert * us << "," << r.t_m_exact * us << "\n";
    out.text("sweep_physical.csv", s.str());
    summary["microseconds_per_unit"] = us;
  }

  const int need = std::max(n_max, photons + 3);
  if (p.contains("field_distribution")) {
    auto c = coefficients(p["field_distribution"]);
    json fi = json::array();
    for (const auto& a : p["atoms"]) {
      auto sys = cavity::build_system(a.get<int>(), dg, std::max<int>(need, static_cast<int>(c.size()) + 2));
      auto rep = cavity::field_independence_test(sys, c);
      json sectors = json::array();
      for (const auto& sct : rep.sectors)
        sectors.push_back({{"photons", sct.photons},
                           {"weight", sct.weight},
                           {"t_m", sct.t_m},
                           {"min_distance", sct.min_distance},
                           {"alpha_eff", sct.alpha_eff}});
      fi.push_back({{"N", a},
                    {"sectors", sectors},
                    {"t_m_mixture", rep.t_m_mixture},
                    {"t_m_spread", rep.t_m_spread},
                    {"alpha_spread", rep.alpha_spread}});
    }
    out.json_file("field_independence.json", fi);
    summary["field_independence"] = fi;
  }
  if (p.contains("subradiance_horizon")) {
    const auto hv = time_spec(p["subradiance_horizon"]).values;
    const double horizon = hv.back();
    json sr = json::array();
    for (const auto& a : p["atoms"]) {
      auto sys = cavity::build_system(a.get<int>(), dg, need);
      auto rep = cavity::subradiance_check(sys, cavity::subradiant_state(sys, photons), horizon);
      lindblad::write_trajectory_csv(out.path("subradiance_N" + std::to_string(a.get<int>()) + ".csv"), rep.times,
                                     {"fidelity"}, {rep.fidelity});
      sr.push_back({{"N", a}, {"min_fidelity", rep.min_fidelity}, {"bound", rep.bound}, {"within_bound", rep.within_bound}});
    }
    summary["subradiance"] = sr;
  }
  out.res.summary = summary;
}

// ---------------------------------------------------------- toy-dephasing

void toy(const ExperimentConfig& cfg, Out& out) {
  const json& p = cfg.params;
  auto cv = coefficients(p["coefficients"]);
  CVec c = Eigen::Map<CVec>(cv.data(), static_cast<Eigen::Index>(cv.size()));
  if (std::abs(c.norm() - 1) > 1e-9) throw InputError("coefficients: not normalized (norm " + tag(c.norm()) + ")");
  const double rate = p["schedule"]["rate"];
  const bool gauss = p["schedule"]["kind"] == "gaussian";
  const int d = static_cast<int>(c.size());
  auto f = [&](double t) {
    CMat m = CMat::Ones(d, d);
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b)
        if (a != b) m(a, b) = gauss ? std::exp(-(a - b) * (a - b) * rate * rate * t * t) : std::exp(-rate * t);
    return m;
  };
  const auto times = time_spec(p["times"]).values;
  auto states = metrics::toy_dephasing(c, f, times);
  std::vector<std::string> names{"purity", "l1_coherence"};
  for (int a = 0; a < d; ++a) names.push_back("p" + std::to_string(a));
  std::vector<std::vector<double>> cols(names.size());
  for (const auto& r : states) {
    cols[0].push_back(metrics::purity(r));
    double l1 = 0;
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b)
        if (a != b) l1 += std::abs(r(a, b));
    cols[1].push_back(l1);
    for (int a = 0; a < d; ++a) cols[2 + a].push_back(r(a, a).real());
  }
  lindblad::write_trajectory_csv(out.path("dephasing.csv"), times, names, cols);
  out.res.summary = {{"final_purity", cols[0].back()}, {"diagonal_purity", c.cwiseAbs2().squaredNorm()}};
}

}  // namespace

RunResult run_experiment(const ExperimentConfig& cfg, const std::string& out_dir) {
  RunResult res;
  Out out{out_dir, res};
  const auto& e = cfg.experiment;
  if (e == "morse-free") morse_free(cfg, out);
  else if (e == "morse-decoherence") morse_decoherence(cfg, out);
  else if (e == "dicke-cat") dicke_cat(cfg, out);
  else if (e == "cat4-wigner") cat4_wigner(cfg, out);
  else if (e == "subradiant-prep") subradiant_prep(cfg, out);
  else if (e == "toy-dephasing") toy(cfg, out);
  else throw SchemaError("experiment: unknown experiment '" + e + "'");
  return res;
}

}  // namespace decolab::cli
