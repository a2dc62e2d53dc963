#include "decolab/kernels.hpp"

namespace decolab::kernels {
namespace {

double dot_ref(const double* a, const double* b, std::size_t n) {
  double s = 0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

void triad_ref(cplx* out, const double* d, const cplx* x, const double* u, const cplx* y,
               const double* w, const cplx* z, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = d[i] * x[i] + u[i] * y[i] + w[i] * z[i];
}

void cmul_ref(cplx* out, const cplx* m, const cplx* x, cplx s, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = s * (m[i] * x[i]);
}

void caxpy_ref(cplx* y, cplx a, const cplx* x, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

const Table kScalar{"scalar", dot_ref, triad_ref, cmul_ref, caxpy_ref};

}  // namespace

const Table& scalar_table() { return kScalar; }

}  // namespace decolab::kernels
