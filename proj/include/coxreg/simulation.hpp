#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "coxreg/core.hpp"
#include "coxreg/empirical.hpp"
#include "coxreg/rng.hpp"

// Synthetic data generators and the Monte Carlo ground-truth ("oracle")
// curves the experiments compare against. Both generators draw a covariate
// X ~ U(0,1), a latent intensity factor tau linear in X, and a latent
// quantile curve, then arrival counts ~ Poisson(alpha * tau) and arrivals by
// inverse sampling from the latent quantile. Every replicate works on an RNG
// stream derived from (seed, replicate index), so generation order and
// thread count never change the data.

namespace coxreg {

// tau = intercept + slope * x + eps with eps truncated normal
// (sd noise_sd, support [noise_lo, noise_hi], mean zero before truncation).
struct TauModel {
  double intercept = 1.0;
  double slope = 0.2;
  double noise_sd = 1.5;
  double noise_lo = -0.2;
  double noise_hi = 0.2;
};

// E(tau | X = x); the truncation is symmetric in the default model so the
// noise mean vanishes, the general formula is used regardless.
double oracle_tau(double x, const TauModel& m);

// E(tau) with X ~ U(0,1).
double expected_tau(const TauModel& m);

// Latent shape model 1: the log slope of the quantile is a Gaussian process
//   C(s, x) = mean_fn(s, x) + sum_k xi_k * component_fns[k](s),
// xi_k ~ N(0, variance_fns[k](x)), tabulated on the interior grid of size
// `grid`; the latent quantile is the normalized cumulative exponential of C
// (see lqd_inverse). Components must be orthonormal on [0,1] within 1e-3.
struct LqdSimConfig {
  TauModel tau;
  double window = 1.0;
  double alpha = 1.0;  // count rate multiplier
  int grid = 100;
  std::function<double(double, double)> mean_fn;
  std::vector<std::function<double(double)>> component_fns;
  std::vector<std::function<double(double)>> variance_fns;
};

// Stock configuration: mean exp(1.5x) + exp(1.5s), components
// -sqrt(2)cos(pi s) and sqrt(2)sin(pi s), score variances 3 + 2x and
// (2 - x)^2. The squared scale functions are read as variances; passing
// sqrt_variances uses their square roots as the variances instead (the
// other reading of the scale notation).
LqdSimConfig default_lqd_config(bool sqrt_variances = false);

// Latent shape model 2: truncated normal on [0, window] with
// mean = mean_intercept + mean_slope * x + eps1 and
// sd = sd_intercept + sd_slope * x + eps2, each eps truncated normal.
struct TruncNormSimConfig {
  TauModel tau;
  double window = 1.0;
  double alpha = 1.0;
  int grid = 100;
  double mean_intercept = 0.3;
  double mean_slope = 0.4;
  double sd_intercept = 0.1;
  double sd_slope = -0.01;
  double mean_noise_sd = 0.5;
  double mean_noise_lo = -0.1;
  double mean_noise_hi = 0.1;
  double sd_noise_sd = 0.5;
  double sd_noise_lo = -0.01;
  double sd_noise_hi = 0.01;
};

TruncNormSimConfig default_truncnorm_config();

// Location-shift variant: mean (1 + x)/3 with wide noise (sd 3 truncated to
// [-0.15, 0.15]), constant sd 0.05 with the sd noise switched off. Under
// the Euclidean average of densities this family mixes into a non-Gaussian
// blur, which is what the variant exists to demonstrate.
TruncNormSimConfig truncnorm_shift_config();

struct LatentTruth {
  double tau;
  QuantileCurve quantile;
};

struct SimulatedDataset {
  double window = 0.0;
  double alpha = 0.0;
  std::uint64_t seed = 0;
  std::vector<PointProcessSample> samples;
  std::vector<LatentTruth> latent;
};

// Normalized cumulative exponential: maps tabulated values C_j on the
// interior grid to the quantile curve Q(t) = T * I(t) / I(1) with
// I(t) = integral of exp(C) over [0, t], C interpolated linearly between
// knots and extended constantly to the boundary stubs. |C| is capped at 50.
QuantileCurve lqd_inverse(const std::vector<double>& values, double window);

SimulatedDataset simulate_lqd(int n, const LqdSimConfig& cfg, std::uint64_t seed);
SimulatedDataset simulate_truncnorm(int n, const TruncNormSimConfig& cfg,
                                    std::uint64_t seed);

// Monte Carlo conditional mean shape at covariate x: pointwise average of
// `reps` fresh latent quantile tabulations. Always monotone.
QuantileCurve oracle_shape(double x, const LqdSimConfig& cfg, int reps,
                           std::uint64_t seed);
QuantileCurve oracle_shape(double x, const TruncNormSimConfig& cfg, int reps,
                           std::uint64_t seed);

// Monte Carlo target of the globally weighted fit: average of
// s(X, x) * Q(X) over fresh draws X ~ U(0,1), with the population weight
// s(X, x) = 1 + 12 (X - 1/2)(x - 1/2). The raw average may dip outside
// monotonicity; the caller decides whether to project.
struct WeightedShapeAverage {
  double window = 0.0;
  std::vector<double> values;
  bool monotone = false;
};

WeightedShapeAverage oracle_shape_global(double x, const LqdSimConfig& cfg, int reps,
                                         std::uint64_t seed);
WeightedShapeAverage oracle_shape_global(double x, const TruncNormSimConfig& cfg,
                                         int reps, std::uint64_t seed);

}  // namespace coxreg
