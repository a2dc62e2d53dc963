#pragma once

#include <complex>
#include <cstddef>
#include <string>

// Hot inner loops with a portable scalar reference and an AVX2/FMA variant.
// The variant is picked once at startup from cpuid; DECOLAB_SIMD=scalar forces
// the reference path.
namespace decolab::kernels {

using cplx = std::complex<double>;

struct Table {
  const char* name;
  // sum_i a[i]*b[i]
  double (*dot)(const double* a, const double* b, std::size_t n);
  // out[i] = d[i]*x[i] + u[i]*y[i] + w[i]*z[i]; real weights, complex data
  void (*triad)(cplx* out, const double* d, const cplx* x, const double* u, const cplx* y,
                const double* w, const cplx* z, std::size_t n);
  // out[i] = s * m[i] * x[i] (complex elementwise product, scalar s)
  void (*cmul)(cplx* out, const cplx* m, const cplx* x, cplx s, std::size_t n);
  // y[i] += a * x[i]
  void (*caxpy)(cplx* y, cplx a, const cplx* x, std::size_t n);
};

const Table& scalar_table();
// nullptr when the binary was built without the AVX2 unit.
const Table* avx2_table();
bool cpu_has_avx2();

const Table& active();
// Forces a table by name ("scalar" or "avx2"); returns false if unavailable.
bool select(const std::string& name);

inline double dot(const double* a, const double* b, std::size_t n) { return active().dot(a, b, n); }
inline void triad(cplx* out, const double* d, const cplx* x, const double* u, const cplx* y,
                  const double* w, const cplx* z, std::size_t n) {
  active().triad(out, d, x, u, y, w, z, n);
}
inline void cmul(cplx* out, const cplx* m, const cplx* x, cplx s, std::size_t n) {
  active().cmul(out, m, x, s, n);
}
inline void caxpy(cplx* y, cplx a, const cplx* x, std::size_t n) { active().caxpy(y, a, x, n); }

}  // namespace decolab::kernels
