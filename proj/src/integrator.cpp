#include <algorithm>
#include <cmath>
#include <sstream>

#include "decolab/lindblad.hpp"

namespace decolab::lindblad {

namespace {

// Dormand-Prince 5(4)
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784,
                 a76 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;
constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                 d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                 d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;

class Rhs {
 public:
  Rhs(const Generator& g) : g_(g), phase_(g.frame.size()), tmp_(g.dim, g.dim), out_(g.dim, g.dim) {}

  // d/dt of the interaction-picture state
  void operator()(double t, const CMat& y, CMat& dy) {
    ++evals;
    if (g_.frame.size() == 0) {
      g_.dissipator(y, dy);
      return;
    }
    set_phase(t);
    to_lab(y, tmp_);
    g_.dissipator(tmp_, out_);
    to_frame(out_, dy);
  }

  void to_lab(const CMat& y, CMat& out) const { apply(y, out, true); }
  void to_frame(const CMat& y, CMat& out) const { apply(y, out, false); }

  void set_phase(double t) {
    if (t == phase_t_ || phase_.size() == 0) return;
    phase_t_ = t;
    for (Eigen::Index k = 0; k < g_.frame.size(); ++k) phase_[k] = std::polar(1.0, g_.frame[k] * t);
  }

  long evals = 0;

 private:
  // frame: y_mn u_m u_n^*, lab: y_mn u_m^* u_n
  void apply(const CMat& y, CMat& out, bool lab) const {
    if (phase_.size() == 0) {
      out = y;
      return;
    }
    const Eigen::Index d = y.rows();
    out.resize(d, d);
    for (Eigen::Index n = 0; n < d; ++n) {
      cplx un = lab ? phase_[n] : std::conj(phase_[n]);
      for (Eigen::Index m = 0; m < d; ++m) {
        cplx um = lab ? std::conj(phase_[m]) : phase_[m];
        out(m, n) = y(m, n) * um * un;
      }
    }
  }

  const Generator& g_;
  CVec phase_;
  double phase_t_ = std::nan("");
  CMat tmp_, out_;
};

double error_norm(const CMat& err, const CMat& y0, const CMat& y1, double tol) {
  double s = 0;
  const Eigen::Index n = err.size();
  for (Eigen::Index i = 0; i < n; ++i) {
    double sc = tol + tol * std::max(std::abs(y0(i)), std::abs(y1(i)));
    double r = std::abs(err(i)) / sc;
    s += r * r;
  }
  return std::sqrt(s / static_cast<double>(n));
}

void hermitize(CMat& m) {
  const Eigen::Index d = m.rows();
  for (Eigen::Index j = 0; j < d; ++j) {
    m(j, j) = cplx(m(j, j).real(), 0);
    for (Eigen::Index i = j + 1; i < d; ++i) {
      cplx v = 0.5 * (m(i, j) + std::conj(m(j, i)));
      m(i, j) = v;
      m(j, i) = std::conj(v);
    }
  }
}

}  // namespace

IntegratorStats integrate(const Generator& gen, const CMat& rho0, const std::vector<double>& t_grid,
                          const IntegratorOptions& opts, const Observer& observer) {
  if (rho0.rows() != gen.dim || rho0.cols() != gen.dim)
    throw InputError("integrate: initial state has dimension " + std::to_string(rho0.rows()) +
                     ", generator expects " + std::to_string(gen.dim));
  if (t_grid.empty()) throw InputError("integrate: empty time grid");
  for (std::size_t i = 1; i < t_grid.size(); ++i)
    if (!(t_grid[i] > t_grid[i - 1])) throw InputError("integrate: time grid not ascending");
  if (!(opts.tol > 0)) throw InputError("integrate: tolerance must be positive");
  if (opts.validate) validate_density(rho0, opts.herm_tol, opts.trace_tol, opts.eig_floor, "integrate: initial state");

  IntegratorStats stats;
  Rhs f(gen);
  const int d = gen.dim;
  double t = t_grid.front();
  const double t_end = t_grid.back();

  CMat y(d, d), ynew(d, d), stage(d, d), err(d, d), snap(d, d), lab(d, d);
  CMat k1(d, d), k2(d, d), k3(d, d), k4(d, d), k5(d, d), k6(d, d), k7(d, d);
  CMat r3(d, d), r4(d, d), r5(d, d), ydiff(d, d);

  f.set_phase(t);
  f.to_frame(rho0, y);

  auto emit = [&](double te, const CMat& yt) {
    f.set_phase(te);
    f.to_lab(yt, lab);
    if (opts.validate) {
      std::ostringstream ctx;
      ctx << "integrate: snapshot at t=" << te << " (step " << stats.steps << ")";
      validate_density(lab, opts.herm_tol, opts.trace_tol, opts.eig_floor, ctx.str());
    }
    if (observer) observer(te, lab);
  };

  std::size_t next = 0;
  emit(t_grid[next++], y);
  if (next == t_grid.size()) return stats;

  f(t, y, k1);
  double span = t_end - t;
  double h = opts.h_init;
  if (h <= 0) {
    double n0 = std::max(y.cwiseAbs().maxCoeff(), 1e-300);
    double n1 = std::max(k1.cwiseAbs().maxCoeff(), 1e-300);
    h = 0.01 * n0 / n1;
    h = std::min(h, span);
  }
  if (opts.h_max > 0) h = std::min(h, opts.h_max);

  const double safety = 0.9, fac_min = 0.2, fac_max = 10.0;
  double err_prev = 1e-4;
  bool rejected_last = false;

  while (next < t_grid.size()) {
    if (stats.steps + stats.rejected >= opts.max_steps) {
      std::ostringstream os;
      os << "integrate: step budget " << opts.max_steps << " exhausted at t=" << t;
      throw NumericalError(os.str());
    }
    if (t + h > t_end) h = t_end - t;
    if (h <= 1e-14 * std::max(1.0, std::abs(t))) {
      std::ostringstream os;
      os << "integrate: step size underflow at t=" << t << " (h=" << h << ", tol " << opts.tol << ")";
      throw NumericalError(os.str());
    }

    stage = y + h * a21 * k1;
    f(t + c2 * h, stage, k2);
    stage = y + h * (a31 * k1 + a32 * k2);
    f(t + c3 * h, stage, k3);
    stage = y + h * (a41 * k1 + a42 * k2 + a43 * k3);
    f(t + c4 * h, stage, k4);
    stage = y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
    f(t + c5 * h, stage, k5);
    stage = y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
    f(t + h, stage, k6);
    ynew = y + h * (a71 * k1 + a73 * k3 + a74 * k4 + a75 * k5 + a76 * k6);
    f(t + h, ynew, k7);
    err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

    double en = error_norm(err, y, ynew, opts.tol);
    if (!std::isfinite(en)) {
      ++stats.rejected;
      h *= 0.1;
      rejected_last = true;
      continue;
    }
    if (en > 1.0) {
      ++stats.rejected;
      h *= std::max(fac_min, safety * std::pow(en, -0.2));
      rejected_last = true;
      continue;
    }

    // accepted
    ++stats.steps;
    const double t_new = t + h;
    ydiff = ynew - y;
    r3 = h * k1 - ydiff;
    r4 = ydiff - h * k7 - r3;
    r5 = h * (d1 * k1 + d3 * k3 + d4 * k4 + d5 * k5 + d6 * k6 + d7 * k7);
    while (next < t_grid.size() && t_grid[next] <= t_new + 1e-12 * std::max(1.0, std::abs(t_new))) {
      double th = (t_grid[next] - t) / h;
      th = std::clamp(th, 0.0, 1.0);
      double th1 = 1.0 - th;
      snap = y + th * (ydiff + th1 * (r3 + th * (r4 + th1 * r5)));
      hermitize(snap);
      emit(t_grid[next], snap);
      ++next;
    }
    y = ynew;
    hermitize(y);
    t = t_new;
    if (next >= t_grid.size()) break;
    f(t, y, k1);

    // PI controller
    double fac = safety * std::pow(en, -0.7 / 5) * std::pow(err_prev, 0.4 / 5);
    fac = std::clamp(fac, fac_min, fac_max);
    if (rejected_last) fac = std::min(fac, 1.0);
    err_prev = std::max(en, 1e-4);
    h *= fac;
    if (opts.h_max > 0) h = std::min(h, opts.h_max);
    rejected_last = false;
  }
  stats.rhs_evals = f.evals;
  return stats;
}

Trajectory integrate(const Generator& gen, const CMat& rho0, const std::vector<double>& t_grid,
                     const IntegratorOptions& opts) {
  Trajectory tr;
  tr.times.reserve(t_grid.size());
  tr.states.reserve(t_grid.size());
  tr.stats = integrate(gen, rho0, t_grid, opts, [&](double t, const CMat& rho) {
    tr.times.push_back(t);
    tr.states.push_back(rho);
  });
  return tr;
}

}  // namespace decolab::lindblad
