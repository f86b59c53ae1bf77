// NEON variants for aarch64, where 128-bit SIMD is baseline.

#if defined(__aarch64__)

#include <arm_neon.h>

#include <cmath>
#include <cstddef>

#include "coxreg/kernels.hpp"

namespace coxreg::kern {

namespace {

double sum_neon(const double* x, std::size_t n) {
  float64x2_t acc = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) acc = vaddq_f64(acc, vld1q_f64(x + i));
  double r = vgetq_lane_f64(acc, 0) + vgetq_lane_f64(acc, 1);
  for (; i < n; ++i) r += x[i];
  return r;
}

double dot_neon(const double* a, const double* b, std::size_t n) {
  float64x2_t acc = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) acc = vfmaq_f64(acc, vld1q_f64(a + i), vld1q_f64(b + i));
  double r = vgetq_lane_f64(acc, 0) + vgetq_lane_f64(acc, 1);
  for (; i < n; ++i) r += a[i] * b[i];
  return r;
}

double sum_sq_diff_neon(const double* a, const double* b, std::size_t n) {
  float64x2_t acc = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t d = vsubq_f64(vld1q_f64(a + i), vld1q_f64(b + i));
    acc = vfmaq_f64(acc, d, d);
  }
  double r = vgetq_lane_f64(acc, 0) + vgetq_lane_f64(acc, 1);
  for (; i < n; ++i) {
    const double d = a[i] - b[i];
    r += d * d;
  }
  return r;
}

void axpy_neon(double alpha, const double* x, double* y, std::size_t n) {
  const float64x2_t va = vdupq_n_f64(alpha);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2)
    vst1q_f64(y + i, vfmaq_f64(vld1q_f64(y + i), va, vld1q_f64(x + i)));
  for (; i < n; ++i) y[i] += alpha * x[i];
}

void kernel_weights_neon(KernelFamily f, const double* xs, std::size_t n,
                         double center, double h, double* out) {
  const double invh = 1.0 / h;
  const float64x2_t vc = vdupq_n_f64(center);
  const float64x2_t vih = vdupq_n_f64(invh);
  const float64x2_t one = vdupq_n_f64(1.0);
  const float64x2_t zero = vdupq_n_f64(0.0);
  std::size_t i = 0;
  switch (f) {
    case KernelFamily::epanechnikov: {
      const float64x2_t c = vdupq_n_f64(0.75);
      for (; i + 2 <= n; i += 2) {
        const float64x2_t u = vmulq_f64(vsubq_f64(vld1q_f64(xs + i), vc), vih);
        const float64x2_t t = vfmsq_f64(one, u, u);
        vst1q_f64(out + i, vmaxq_f64(zero, vmulq_f64(c, t)));
      }
      for (; i < n; ++i) {
        const double u = (xs[i] - center) * invh;
        const double t = 1.0 - u * u;
        out[i] = t > 0.0 ? 0.75 * t : 0.0;
      }
      break;
    }
    case KernelFamily::triangular: {
      for (; i + 2 <= n; i += 2) {
        const float64x2_t u = vmulq_f64(vsubq_f64(vld1q_f64(xs + i), vc), vih);
        const float64x2_t t = vsubq_f64(one, vabsq_f64(u));
        vst1q_f64(out + i, vmaxq_f64(zero, t));
      }
      for (; i < n; ++i) {
        const double t = 1.0 - std::fabs((xs[i] - center) * invh);
        out[i] = t > 0.0 ? t : 0.0;
      }
      break;
    }
    case KernelFamily::quartic: {
      const float64x2_t c = vdupq_n_f64(0.9375);
      for (; i + 2 <= n; i += 2) {
        const float64x2_t u = vmulq_f64(vsubq_f64(vld1q_f64(xs + i), vc), vih);
        const float64x2_t t = vmaxq_f64(zero, vfmsq_f64(one, u, u));
        vst1q_f64(out + i, vmulq_f64(c, vmulq_f64(t, t)));
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

constexpr Ops kNeonOps = {sum_neon, dot_neon, sum_sq_diff_neon, axpy_neon,
                          kernel_weights_neon};

}  // namespace

const Ops& neon_ops() { return kNeonOps; }

}  // namespace coxreg::kern

#endif  // aarch64
