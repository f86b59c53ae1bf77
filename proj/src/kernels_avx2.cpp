// AVX2 + FMA variants of the hot loops. This translation unit is the only one
// built with -mavx2 -mfma; callers reach it through the runtime dispatch in
// kernels.cpp, so the rest of the binary stays runnable on baseline x86-64.

#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

#include <cmath>
#include <cstddef>

#include "coxreg/kernels.hpp"

namespace coxreg::kern {

namespace {

// Lanes are reduced in a fixed order so results are reproducible run to run.
inline double hsum(__m256d v) {
  alignas(32) double lane[4];
  _mm256_store_pd(lane, v);
  return (lane[0] + lane[1]) + (lane[2] + lane[3]);
}

double sum_avx2(const double* x, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) acc = _mm256_add_pd(acc, _mm256_loadu_pd(x + i));
  double r = hsum(acc);
  for (; i < n; ++i) r += x[i];
  return r;
}

double dot_avx2(const double* a, const double* b, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    acc = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc);
  double r = hsum(acc);
  for (; i < n; ++i) r += a[i] * b[i];
  return r;
}

double sum_sq_diff_avx2(const double* a, const double* b, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
    acc = _mm256_fmadd_pd(d, d, acc);
  }
  double r = hsum(acc);
  for (; i < n; ++i) {
    const double d = a[i] - b[i];
    r += d * d;
  }
  return r;
}

void axpy_avx2(double alpha, const double* x, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d r = _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i));
    _mm256_storeu_pd(y + i, r);
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

void kernel_weights_avx2(KernelFamily f, const double* xs, std::size_t n,
                         double center, double h, double* out) {
  const double invh = 1.0 / h;
  const __m256d vc = _mm256_set1_pd(center);
  const __m256d vih = _mm256_set1_pd(invh);
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d zero = _mm256_setzero_pd();
  std::size_t i = 0;
  switch (f) {
    case KernelFamily::epanechnikov: {
      const __m256d c = _mm256_set1_pd(0.75);
      for (; i + 4 <= n; i += 4) {
        const __m256d u = _mm256_mul_pd(_mm256_sub_pd(_mm256_loadu_pd(xs + i), vc), vih);
        const __m256d t = _mm256_fnmadd_pd(u, u, one);  // 1 - u^2
        _mm256_storeu_pd(out + i, _mm256_max_pd(zero, _mm256_mul_pd(c, t)));
      }
      for (; i < n; ++i) {
        const double u = (xs[i] - center) * invh;
        const double t = 1.0 - u * u;
        out[i] = t > 0.0 ? 0.75 * t : 0.0;
      }
      break;
    }
    case KernelFamily::triangular: {
      const __m256d absmask = _mm256_castsi256_pd(_mm256_set1_epi64x(0x7fffffffffffffffLL));
      for (; i + 4 <= n; i += 4) {
        const __m256d u = _mm256_mul_pd(_mm256_sub_pd(_mm256_loadu_pd(xs + i), vc), vih);
        const __m256d t = _mm256_sub_pd(one, _mm256_and_pd(u, absmask));
        _mm256_storeu_pd(out + i, _mm256_max_pd(zero, t));
      }
      for (; i < n; ++i) {
        const double t = 1.0 - std::fabs((xs[i] - center) * invh);
        out[i] = t > 0.0 ? t : 0.0;
      }
      break;
    }
    case KernelFamily::quartic: {
      const __m256d c = _mm256_set1_pd(0.9375);
      for (; i + 4 <= n; i += 4) {
        const __m256d u = _mm256_mul_pd(_mm256_sub_pd(_mm256_loadu_pd(xs + i), vc), vih);
        const __m256d t = _mm256_max_pd(zero, _mm256_fnmadd_pd(u, u, one));
        _mm256_storeu_pd(out + i, _mm256_mul_pd(c, _mm256_mul_pd(t, t)));
      }
      for (; i < n; ++i) {
        const double u = (xs[i] - center) * invh;
        const double t = 1.0 - u * u;
        out[i] = t > 0.0 ? 0.9375 * t * t : 0.0;
      }
      break;
    }
  }
}

constexpr Ops kAvx2Ops = {sum_avx2, dot_avx2, sum_sq_diff_avx2, axpy_avx2,
                          kernel_weights_avx2};

}  // namespace

const Ops& avx2_ops() { return kAvx2Ops; }

}  // namespace coxreg::kern

#endif  // x86-64
