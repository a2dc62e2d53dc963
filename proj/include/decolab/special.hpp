#pragma once

#include <complex>
#include <vector>

namespace decolab::special {

// |v| = exp(log_abs), sign in {-1, 0, +1}
struct SignedLog {
  double log_abs;
  int sign;
};

// Generalized Laguerre polynomial L_n^{(alpha)}(y) in signed-log form.
SignedLog laguerre(int n, double alpha, double y);

// Terminating 2F1(-n, b; c; z).
std::complex<double> hyp2f1_terminating(int n, double b, double c, std::complex<double> z);

double digamma(double x);

// n-point Gauss-Legendre rule on [-1, 1], nodes ascending.
void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights);

// Orthonormal associated Legendre values for fixed order q >= 0:
// out[k - q] = N_kq P_k^q(x) for k = q..kmax, where Y_kq = N_kq P_k^q(cos th) e^{i q phi}
// (Condon-Shortley phase included).
void normalized_legendre(int kmax, int q, double x, std::vector<double>& out);

double log_binomial(double n, double k);

}  // namespace decolab::special
