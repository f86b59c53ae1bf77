#include "coxreg/kernels.hpp"

#include <cmath>
#include <cstdlib>
#include <cstring>

#include "coxreg/errors.hpp"

#if defined(__x86_64__) || defined(_M_X64)
#define COXREG_X86 1
#endif
#if defined(__aarch64__)
#define COXREG_ARM 1
#endif

namespace coxreg::kern {

KernelFamily kernel_family_from_name(const char* name) {
  if (std::strcmp(name, "epanechnikov") == 0) return KernelFamily::epanechnikov;
  if (std::strcmp(name, "triangular") == 0) return KernelFamily::triangular;
  if (std::strcmp(name, "quartic") == 0) return KernelFamily::quartic;
  throw ConfigError(std::string("unknown kernel family: ") + name);
}

const char* kernel_family_name(KernelFamily f) {
  switch (f) {
    case KernelFamily::epanechnikov: return "epanechnikov";
    case KernelFamily::triangular: return "triangular";
    case KernelFamily::quartic: return "quartic";
  }
  return "?";
}

const char* isa_name(Isa isa) {
  switch (isa) {
    case Isa::scalar: return "scalar";
    case Isa::avx2: return "avx2";
    case Isa::neon: return "neon";
  }
  return "?";
}

namespace {

double sum_scalar(const double* x, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += x[i];
  return acc;
}

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

double sum_sq_diff_scalar(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = a[i] - b[i];
    acc += d * d;
  }
  return acc;
}

void axpy_scalar(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void kernel_weights_scalar(KernelFamily f, const double* xs, std::size_t n,
                           double center, double h, double* out) {
  const double invh = 1.0 / h;
  switch (f) {
    case KernelFamily::epanechnikov:
      for (std::size_t i = 0; i < n; ++i) {
        const double u = (xs[i] - center) * invh;
        const double t = 1.0 - u * u;
        out[i] = t > 0.0 ? 0.75 * t : 0.0;
      }
      break;
    case KernelFamily::triangular:
      for (std::size_t i = 0; i < n; ++i) {
        const double t = 1.0 - std::fabs((xs[i] - center) * invh);
        out[i] = t > 0.0 ? t : 0.0;
      }
      break;
    case KernelFamily::quartic:
      for (std::size_t i = 0; i < n; ++i) {
        const double u = (xs[i] - center) * invh;
        const double t = 1.0 - u * u;
        out[i] = t > 0.0 ? 0.9375 * t * t : 0.0;
      }
      break;
  }
}

constexpr Ops kScalarOps = {sum_scalar, dot_scalar, sum_sq_diff_scalar,
                            axpy_scalar, kernel_weights_scalar};

}  // namespace

const Ops& scalar_ops() { return kScalarOps; }

#if defined(COXREG_X86)
// Defined in kernels_avx2.cpp, compiled with -mavx2 -mfma.
const Ops& avx2_ops();
#endif
#if defined(COXREG_ARM)
const Ops& neon_ops();
#endif

namespace {

struct Dispatch {
  const Ops* ops;
  Isa isa;
};

Dispatch pick() {
  const char* req = std::getenv("COXREG_SIMD");
  const bool forced_scalar = req != nullptr && std::strcmp(req, "scalar") == 0;
#if defined(COXREG_X86)
  const bool have_avx2 = __builtin_cpu_supports("avx2") != 0;
  if (req != nullptr && std::strcmp(req, "avx2") == 0) {
    if (!have_avx2) throw ConfigError("COXREG_SIMD=avx2 but cpu lacks avx2");
    return {&avx2_ops(), Isa::avx2};
  }
  if (!forced_scalar && have_avx2) return {&avx2_ops(), Isa::avx2};
#elif defined(COXREG_ARM)
  if (req != nullptr && std::strcmp(req, "neon") == 0) return {&neon_ops(), Isa::neon};
  if (!forced_scalar) return {&neon_ops(), Isa::neon};
#endif
  (void)forced_scalar;
  return {&kScalarOps, Isa::scalar};
}

const Dispatch& dispatch() {
  static const Dispatch d = pick();
  return d;
}

}  // namespace

const Ops& active_ops() { return *dispatch().ops; }

Isa active_isa() { return dispatch().isa; }

const Ops* vector_ops() {
#if defined(COXREG_X86)
  if (__builtin_cpu_supports("avx2")) return &avx2_ops();
#elif defined(COXREG_ARM)
  return &neon_ops();
#endif
  return nullptr;
}

}  // namespace coxreg::kern
