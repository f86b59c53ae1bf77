#pragma once

#include <span>
#include <vector>

#include "coxreg/kernels.hpp"

// Regression weight machinery. Local weights implement the kernel-localized
// linear-correction form
//   s_i(x, h) = K_h(X_i - x) [u2 - u1 (X_i - x)] / (u0 u2 - u1^2),
// with u_j the j-th local moment n^-1 sum K_h(X_i - x)(X_i - x)^j. Global
// weights implement s_i(x) = 1 + (X_i - Xbar)' Cov^-1 (x - Xbar) with the
// 1/n covariance. Both families average to one by construction, and the
// local family is orthogonal to (X_i - x); those identities are checked to
// 1e-10 in the test suite.

namespace coxreg {

struct WeightVector {
  std::vector<double> w;   // one weight per sample, mean 1
  int window_count = 0;    // samples with nonzero kernel weight (local only)
};

// Scalar-covariate local weights. Throws NumericError when the windowed
// design is degenerate (fewer than two distinct covariate values carry
// kernel weight, detected through u0 u2 - u1^2 <= 1e-14 * scale).
WeightVector local_weights(std::span<const double> xs, double x, double h,
                           kern::KernelFamily kernel);

// Global weights for p-dimensional covariates, X row-major n x p. Throws
// NumericError when the covariance is not SPD or its condition number
// reaches 1e12.
WeightVector global_weights(std::span<const double> X, int n, int p,
                            std::span<const double> x);

// Local-linear point estimate m(x) from scatter (xs, ys); shares the weight
// construction above, used for density recovery and by tests.
double local_linear_fit(std::span<const double> xs, std::span<const double> ys, double x,
                        double h, kern::KernelFamily kernel);

}  // namespace coxreg
