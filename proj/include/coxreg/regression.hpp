#pragma once

#include <span>
#include <string>
#include <vector>

#include "coxreg/core.hpp"
#include "coxreg/empirical.hpp"
#include "coxreg/kernels.hpp"
#include "coxreg/projection.hpp"
#include "coxreg/smoothing.hpp"

// The estimators. Shape fits minimize the weighted quantile-space objective:
// the weighted average of the per-sample empirical quantiles is projected
// onto the monotone band and read back as a curve. Intensity-factor fits are
// the clamped weighted count ratio
//   tau_rel(x) = max(0, n^-1 sum_i s_i(x) N_i) / mean(N),
// standardized so that it is relative to the population mean factor. Local
// variants use kernel-localized weights (scalar covariate only), global
// variants the linear-projection weights (any p).

namespace coxreg {

enum class FitMode { local, global };
FitMode fit_mode_from_name(const std::string& name);
const char* fit_mode_name(FitMode m);

struct FitConfig {
  double bandwidth = 0.0;           // local fits only; must be > 0 there
  kern::KernelFamily kernel = kern::KernelFamily::epanechnikov;
  int nu = 100;                     // interior grid size
  QuantileConstraints constraints;  // carries the observation window
  int density_grid = 512;           // output grid for density recovery
  double density_bandwidth = 0.0;   // 0 -> 10 * window / density_grid
};

// Per-dataset cache: covariates, counts and the n x nu matrix of empirical
// quantile rows. Fits at many x reuse it; the convenience overloads taking
// raw samples build one internally per call.
struct PreparedSamples {
  double window = 0.0;
  int n = 0;
  int p = 0;
  int nu = 0;
  std::vector<double> covariates;  // n x p row-major
  std::vector<double> counts;      // arrival counts, as doubles
  std::vector<double> quantiles;   // n x nu row-major
  double mean_count = 0.0;
};

PreparedSamples prepare_samples(std::span<const PointProcessSample> samples,
                                double window, int nu);

struct FitDiagnostics {
  int weight_support = 0;     // samples with nonzero kernel weight (local); n (global)
  bool tau_clamped = false;   // the max(0, .) clamp activated
  int qp_iterations = 0;
  double qp_residual = 0.0;
  bool qp_fallback = false;
};

struct ConditionalIntensityFit {
  std::vector<double> x;
  double tau_rel;  // >= 0
  QuantileCurve shape_quantile;
  DensityCurve shape_density;
  FitDiagnostics diagnostics;
};

// Local fits: scalar covariate, kernel window cfg.bandwidth around x.
QuantileCurve fit_shape_local(const PreparedSamples& ps, double x, const FitConfig& cfg,
                              FitDiagnostics* diag = nullptr);
double fit_tau_local(const PreparedSamples& ps, double x, const FitConfig& cfg,
                     FitDiagnostics* diag = nullptr);
ConditionalIntensityFit fit_intensity_local(const PreparedSamples& ps, double x,
                                            const FitConfig& cfg);

QuantileCurve fit_shape_local(std::span<const PointProcessSample> samples, double x,
                              const FitConfig& cfg, FitDiagnostics* diag = nullptr);
double fit_tau_local(std::span<const PointProcessSample> samples, double x,
                     const FitConfig& cfg, FitDiagnostics* diag = nullptr);
ConditionalIntensityFit fit_intensity_local(std::span<const PointProcessSample> samples,
                                            double x, const FitConfig& cfg);

// Global fits: linear-projection weights, covariate vector of length p.
QuantileCurve fit_shape_global(const PreparedSamples& ps, std::span<const double> x,
                               const FitConfig& cfg, FitDiagnostics* diag = nullptr);
double fit_tau_global(const PreparedSamples& ps, std::span<const double> x,
                      const FitConfig& cfg, FitDiagnostics* diag = nullptr);
ConditionalIntensityFit fit_intensity_global(const PreparedSamples& ps,
                                             std::span<const double> x,
                                             const FitConfig& cfg);

QuantileCurve fit_shape_global(std::span<const PointProcessSample> samples,
                               std::span<const double> x, const FitConfig& cfg,
                               FitDiagnostics* diag = nullptr);
double fit_tau_global(std::span<const PointProcessSample> samples,
                      std::span<const double> x, const FitConfig& cfg,
                      FitDiagnostics* diag = nullptr);
ConditionalIntensityFit fit_intensity_global(std::span<const PointProcessSample> samples,
                                             std::span<const double> x,
                                             const FitConfig& cfg);

}  // namespace coxreg
