#include "decolab/kernels.hpp"

#if defined(__AVX2__) && defined(__FMA__)
#include <immintrin.h>

namespace decolab::kernels {
namespace {

inline __m256d dup_pairs(const double* p) {
  // [p0, p0, p1, p1]
  return _mm256_permute4x64_pd(_mm256_castpd128_pd256(_mm_loadu_pd(p)), 0x50);
}

// (a * b) for two packed complex numbers
inline __m256d cmul2(__m256d a, __m256d b) {
  __m256d br = _mm256_movedup_pd(b);
  __m256d bi = _mm256_permute_pd(b, 0xF);
  __m256d as = _mm256_permute_pd(a, 0x5);
  return _mm256_fmaddsub_pd(a, br, _mm256_mul_pd(as, bi));
}

double dot_avx2(const double* a, const double* b, std::size_t n) {
  __m256d s0 = _mm256_setzero_pd(), s1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    s0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), s0);
    s1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), s1);
  }
  for (; i + 4 <= n; i += 4) s0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), s0);
  s0 = _mm256_add_pd(s0, s1);
  __m128d h = _mm_add_pd(_mm256_castpd256_pd128(s0), _mm256_extractf128_pd(s0, 1));
  double s = _mm_cvtsd_f64(_mm_add_sd(h, _mm_unpackhi_pd(h, h)));
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

void triad_avx2(cplx* out, const double* d, const cplx* x, const double* u, const cplx* y,
                const double* w, const cplx* z, std::size_t n) {
  auto* o = reinterpret_cast<double*>(out);
  auto* xp = reinterpret_cast<const double*>(x);
  auto* yp = reinterpret_cast<const double*>(y);
  auto* zp = reinterpret_cast<const double*>(z);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    __m256d acc = _mm256_mul_pd(dup_pairs(d + i), _mm256_loadu_pd(xp + 2 * i));
    acc = _mm256_fmadd_pd(dup_pairs(u + i), _mm256_loadu_pd(yp + 2 * i), acc);
    acc = _mm256_fmadd_pd(dup_pairs(w + i), _mm256_loadu_pd(zp + 2 * i), acc);
    _mm256_storeu_pd(o + 2 * i, acc);
  }
  for (; i < n; ++i) out[i] = d[i] * x[i] + u[i] * y[i] + w[i] * z[i];
}

void cmul_avx2(cplx* out, const cplx* m, const cplx* x, cplx s, std::size_t n) {
  auto* o = reinterpret_cast<double*>(out);
  auto* mp = reinterpret_cast<const double*>(m);
  auto* xp = reinterpret_cast<const double*>(x);
  const __m256d sv = _mm256_setr_pd(s.real(), s.imag(), s.real(), s.imag());
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    __m256d p = cmul2(_mm256_loadu_pd(mp + 2 * i), _mm256_loadu_pd(xp + 2 * i));
    _mm256_storeu_pd(o + 2 * i, cmul2(sv, p));
  }
  for (; i < n; ++i) out[i] = s * (m[i] * x[i]);
}

void caxpy_avx2(cplx* y, cplx a, const cplx* x, std::size_t n) {
  auto* yp = reinterpret_cast<double*>(y);
  auto* xp = reinterpret_cast<const double*>(x);
  const __m256d ar = _mm256_set1_pd(a.real());
  const __m256d ai = _mm256_set1_pd(a.imag());
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    __m256d xv = _mm256_loadu_pd(xp + 2 * i);
    __m256d prod = _mm256_fmaddsub_pd(xv, ar, _mm256_mul_pd(_mm256_permute_pd(xv, 0x5), ai));
    _mm256_storeu_pd(yp + 2 * i, _mm256_add_pd(_mm256_loadu_pd(yp + 2 * i), prod));
  }
  for (; i < n; ++i) y[i] += a * x[i];
}

const Table kAvx2{"avx2", dot_avx2, triad_avx2, cmul_avx2, caxpy_avx2};

}  // namespace

const Table* avx2_table() { return &kAvx2; }

}  // namespace decolab::kernels

#else

namespace decolab::kernels {
const Table* avx2_table() { return nullptr; }
}  // namespace decolab::kernels

#endif
