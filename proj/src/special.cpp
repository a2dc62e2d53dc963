#include "decolab/special.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include <boost/multiprecision/cpp_bin_float.hpp>

namespace decolab::special {

SignedLog laguerre(int n, double alpha, double y) {
  if (n < 0) throw std::invalid_argument("laguerre: negative degree");
  // Three-term recurrence with occasional rescaling; scale is kept in log form.
  double prev = 1.0, cur = 1.0 + alpha - y, log_scale = 0;
  if (n == 0) return {0.0, 1};
  for (int k = 1; k < n; ++k) {
    double next = ((2.0 * k + 1.0 + alpha - y) * cur - (k + alpha) * prev) / (k + 1.0);
    prev = cur;
    cur = next;
    double m = std::fabs(cur);
    if (m > 1e200) {
      prev /= m;
      cur /= m;
      log_scale += std::log(m);
    }
  }
  if (cur == 0) return {-INFINITY, 0};
  return {std::log(std::fabs(cur)) + log_scale, cur > 0 ? 1 : -1};
}

std::complex<double> hyp2f1_terminating(int n, double b, double c, std::complex<double> z) {
  // The partial sums cancel by many orders of magnitude near z = 1, so the
  // series is accumulated with 100 decimal digits.
  using mp = boost::multiprecision::cpp_bin_float_100;
  const mp zr = z.real(), zi = z.imag();
  mp tr = 1, ti = 0, sr = 1, si = 0;
  for (int k = 0; k < n; ++k) {
    mp f = (mp(k) - n) * (mp(b) + k) / ((mp(c) + k) * (k + 1));
    mp nr = (tr * zr - ti * zi) * f;
    mp ni = (tr * zi + ti * zr) * f;
    tr = nr;
    ti = ni;
    sr += tr;
    si += ti;
  }
  return {sr.convert_to<double>(), si.convert_to<double>()};
}

double digamma(double x) {
  double acc = 0;
  while (x < 8) {
    acc -= 1.0 / x;
    x += 1;
  }
  double x2 = 1.0 / (x * x);
  return acc + std::log(x) - 0.5 / x -
         x2 * (1.0 / 12 - x2 * (1.0 / 120 - x2 * (1.0 / 252 - x2 * (1.0 / 240 - x2 / 132))));
}

void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
  nodes.assign(n, 0);
  weights.assign(n, 0);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1, p1 = x;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2.0 * k - 1) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) p0 = 1;
      dp = n * (x * p1 - p0) / (x * x - 1);
      double dx = p1 / dp;
      x -= dx;
      if (std::fabs(dx) < 1e-16) break;
    }
    double w = 2.0 / ((1 - x * x) * dp * dp);
    nodes[i] = -x;
    nodes[n - 1 - i] = x;
    weights[i] = weights[n - 1 - i] = w;
  }
}

void normalized_legendre(int kmax, int q, double x, std::vector<double>& out) {
  out.assign(kmax >= q ? kmax - q + 1 : 0, 0.0);
  if (kmax < q) return;
  const double sx = std::sqrt(std::max(0.0, 1 - x * x));
  double pqq = std::sqrt(1.0 / (4 * std::numbers::pi));
  for (int m = 1; m <= q; ++m) pqq *= -std::sqrt((2.0 * m + 1) / (2.0 * m)) * sx;
  out[0] = pqq;
  if (kmax == q) return;
  out[1] = std::sqrt(2.0 * q + 3) * x * pqq;
  for (int k = q + 2; k <= kmax; ++k) {
    double kk = k, qq = q;
    double a = std::sqrt((4 * kk * kk - 1) / (kk * kk - qq * qq));
    double b = std::sqrt(((kk - 1) * (kk - 1) - qq * qq) / (4 * (kk - 1) * (kk - 1) - 1));
    out[k - q] = a * (x * out[k - q - 1] - b * out[k - q - 2]);
  }
}

double log_binomial(double n, double k) {
  return std::lgamma(n + 1) - std::lgamma(k + 1) - std::lgamma(n - k + 1);
}

}  // namespace decolab::special
