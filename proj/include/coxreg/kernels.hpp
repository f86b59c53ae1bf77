#pragma once

#include <cstddef>

// Vectorized inner loops shared by the smoothing, regression and evaluation
// code paths: reductions over sample vectors and kernel-weight evaluation.
// Scalar reference implementations always exist; AVX2 (x86) and NEON
// (aarch64) variants are selected once at startup from cpu capabilities.
// The COXREG_SIMD environment variable ("scalar", "avx2", "neon", "auto")
// overrides detection, mainly so the equivalence tests can pin a path.

namespace coxreg::kern {

enum class KernelFamily { epanechnikov, triangular, quartic };

KernelFamily kernel_family_from_name(const char* name);
const char* kernel_family_name(KernelFamily f);

struct Ops {
  double (*sum)(const double* x, std::size_t n);
  double (*dot)(const double* a, const double* b, std::size_t n);
  // sum of (a[i] - b[i])^2
  double (*sum_sq_diff)(const double* a, const double* b, std::size_t n);
  // y[i] += alpha * x[i]
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  // out[i] = K((xs[i] - center) / h), zero outside |u| <= 1, not divided by h
  void (*kernel_weights)(KernelFamily f, const double* xs, std::size_t n,
                         double center, double h, double* out);
};

enum class Isa { scalar, avx2, neon };

const char* isa_name(Isa isa);

// Implementation table for the active path (dispatch happens once).
const Ops& active_ops();
Isa active_isa();

// Direct handles for equivalence testing.
const Ops& scalar_ops();
// Best vector implementation compiled in and supported on this host, or
// nullptr when only the scalar path exists.
const Ops* vector_ops();

// Convenience forwarders through the active table.
inline double sum(const double* x, std::size_t n) { return active_ops().sum(x, n); }
inline double dot(const double* a, const double* b, std::size_t n) {
  return active_ops().dot(a, b, n);
}
inline double sum_sq_diff(const double* a, const double* b, std::size_t n) {
  return active_ops().sum_sq_diff(a, b, n);
}
inline void axpy(double alpha, const double* x, double* y, std::size_t n) {
  active_ops().axpy(alpha, x, y, n);
}
inline void kernel_weights(KernelFamily f, const double* xs, std::size_t n,
                           double center, double h, double* out) {
  active_ops().kernel_weights(f, xs, n, center, h, out);
}

}  // namespace coxreg::kern
