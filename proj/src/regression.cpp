#include "coxreg/regression.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "coxreg/errors.hpp"

namespace coxreg {

FitMode fit_mode_from_name(const std::string& name) {
  if (name == "local") return FitMode::local;
  if (name == "global") return FitMode::global;
  throw ConfigError("unknown fit mode '" + name + "' (expected local or global)");
}

const char* fit_mode_name(FitMode m) {
  return m == FitMode::local ? "local" : "global";
}

namespace {

void check_config(const PreparedSamples& ps, const FitConfig& cfg) {
  if (cfg.nu != ps.nu)
    throw ConfigError("fit nu=" + std::to_string(cfg.nu) +
                      " does not match prepared grid nu=" + std::to_string(ps.nu));
  if (cfg.constraints.window != ps.window)
    throw ConfigError("fit window does not match prepared window");
  if (ps.n == 0) throw DataError("no samples");
}

WeightVector weights_local(const PreparedSamples& ps, double x, const FitConfig& cfg) {
  check_config(ps, cfg);
  if (ps.p != 1)
    throw ConfigError("local fits take a scalar covariate; got p=" +
                      std::to_string(ps.p));
  return local_weights(ps.covariates, x, cfg.bandwidth, cfg.kernel);
}

WeightVector weights_global(const PreparedSamples& ps, std::span<const double> x,
                            const FitConfig& cfg) {
  check_config(ps, cfg);
  if (static_cast<int>(x.size()) != ps.p)
    throw ConfigError("covariate point has length " + std::to_string(x.size()) +
                      ", expected " + std::to_string(ps.p));
  return global_weights(ps.covariates, ps.n, ps.p, x);
}

QuantileCurve shape_from_weights(const PreparedSamples& ps, const WeightVector& wv,
                                 const FitConfig& cfg, FitDiagnostics* diag) {
  std::vector<double> acc(ps.nu, 0.0);
  const double inv_n = 1.0 / ps.n;
  for (int i = 0; i < ps.n; ++i) {
    const double wi = wv.w[i] * inv_n;
    if (wi == 0.0) continue;
    kern::axpy(wi, &ps.quantiles[static_cast<std::size_t>(i) * ps.nu], acc.data(),
               ps.nu);
  }
  auto res = project_quantile(acc, cfg.constraints);
  if (diag) {
    diag->qp_iterations = res.iterations;
    diag->qp_residual = res.primal_residual;
    diag->qp_fallback = res.used_fallback;
  }
  return interpolate_solution(res.q, cfg.constraints.window);
}

double tau_from_weights(const PreparedSamples& ps, const WeightVector& wv,
                        FitDiagnostics* diag) {
  if (!(ps.mean_count > 0.0))
    throw DataError("every replicate has zero arrivals; intensity factor undefined");
  const double num = kern::dot(wv.w.data(), ps.counts.data(), ps.n) / ps.n;
  double tau = num / ps.mean_count;
  const bool clamped = tau < 0.0;
  if (clamped) tau = 0.0;
  if (diag) diag->tau_clamped = clamped;
  return tau;
}

ConditionalIntensityFit assemble(const PreparedSamples& ps, std::vector<double> x,
                                 const WeightVector& wv, const FitConfig& cfg) {
  FitDiagnostics diag;
  diag.weight_support = wv.window_count;
  const double tau = tau_from_weights(ps, wv, &diag);
  QuantileCurve q = shape_from_weights(ps, wv, cfg, &diag);
  const double T = cfg.constraints.window;
  const int m = cfg.density_grid;
  if (m < 8) throw ConfigError("density grid too small");
  const double b =
      cfg.density_bandwidth > 0.0 ? cfg.density_bandwidth : 10.0 * T / m;
  CdfCurve f = quantile_to_cdf(q, m);
  DensityCurve d = cdf_to_density(f, b, m, cfg.kernel);
  return {std::move(x), tau, std::move(q), std::move(d), diag};
}

}  // namespace

PreparedSamples prepare_samples(std::span<const PointProcessSample> samples,
                                double window, int nu) {
  if (samples.empty()) throw DataError("no samples");
  if (nu < 1) throw ConfigError("nu must be positive");
  if (!(window > 0.0)) throw ConfigError("window must be positive");

  PreparedSamples ps;
  ps.window = window;
  ps.n = static_cast<int>(samples.size());
  ps.p = static_cast<int>(samples[0].x.size());
  ps.nu = nu;
  if (ps.p == 0) throw DataError("samples carry no covariates");
  ps.covariates.resize(static_cast<std::size_t>(ps.n) * ps.p);
  ps.counts.resize(ps.n);
  ps.quantiles.resize(static_cast<std::size_t>(ps.n) * nu);

  std::vector<double> sorted;
  double total = 0.0;
  for (int i = 0; i < ps.n; ++i) {
    const auto& s = samples[i];
    if (static_cast<int>(s.x.size()) != ps.p)
      throw DataError("sample " + std::to_string(i) + " has " +
                      std::to_string(s.x.size()) + " covariates, expected " +
                      std::to_string(ps.p));
    std::copy(s.x.begin(), s.x.end(),
              ps.covariates.begin() + static_cast<std::size_t>(i) * ps.p);
    ps.counts[i] = static_cast<double>(s.arrivals.size());
    total += ps.counts[i];
    sorted = s.arrivals;
    std::sort(sorted.begin(), sorted.end());
    empirical_quantile_values(sorted, window, nu,
                              &ps.quantiles[static_cast<std::size_t>(i) * nu]);
  }
  ps.mean_count = total / ps.n;
  return ps;
}

QuantileCurve fit_shape_local(const PreparedSamples& ps, double x, const FitConfig& cfg,
                              FitDiagnostics* diag) {
  const auto wv = weights_local(ps, x, cfg);
  if (diag) diag->weight_support = wv.window_count;
  return shape_from_weights(ps, wv, cfg, diag);
}

double fit_tau_local(const PreparedSamples& ps, double x, const FitConfig& cfg,
                     FitDiagnostics* diag) {
  const auto wv = weights_local(ps, x, cfg);
  if (diag) diag->weight_support = wv.window_count;
  return tau_from_weights(ps, wv, diag);
}

ConditionalIntensityFit fit_intensity_local(const PreparedSamples& ps, double x,
                                            const FitConfig& cfg) {
  const auto wv = weights_local(ps, x, cfg);
  return assemble(ps, {x}, wv, cfg);
}

QuantileCurve fit_shape_global(const PreparedSamples& ps, std::span<const double> x,
                               const FitConfig& cfg, FitDiagnostics* diag) {
  const auto wv = weights_global(ps, x, cfg);
  if (diag) diag->weight_support = wv.window_count;
  return shape_from_weights(ps, wv, cfg, diag);
}

double fit_tau_global(const PreparedSamples& ps, std::span<const double> x,
                      const FitConfig& cfg, FitDiagnostics* diag) {
  const auto wv = weights_global(ps, x, cfg);
  if (diag) diag->weight_support = wv.window_count;
  return tau_from_weights(ps, wv, diag);
}

ConditionalIntensityFit fit_intensity_global(const PreparedSamples& ps,
                                             std::span<const double> x,
                                             const FitConfig& cfg) {
  const auto wv = weights_global(ps, x, cfg);
  return assemble(ps, std::vector<double>(x.begin(), x.end()), wv, cfg);
}

QuantileCurve fit_shape_local(std::span<const PointProcessSample> samples, double x,
                              const FitConfig& cfg, FitDiagnostics* diag) {
  return fit_shape_local(prepare_samples(samples, cfg.constraints.window, cfg.nu), x,
                         cfg, diag);
}

double fit_tau_local(std::span<const PointProcessSample> samples, double x,
                     const FitConfig& cfg, FitDiagnostics* diag) {
  return fit_tau_local(prepare_samples(samples, cfg.constraints.window, cfg.nu), x, cfg,
                       diag);
}

ConditionalIntensityFit fit_intensity_local(std::span<const PointProcessSample> samples,
                                            double x, const FitConfig& cfg) {
  return fit_intensity_local(prepare_samples(samples, cfg.constraints.window, cfg.nu),
                             x, cfg);
}

QuantileCurve fit_shape_global(std::span<const PointProcessSample> samples,
                               std::span<const double> x, const FitConfig& cfg,
                               FitDiagnostics* diag) {
  return fit_shape_global(prepare_samples(samples, cfg.constraints.window, cfg.nu), x,
                          cfg, diag);
}

double fit_tau_global(std::span<const PointProcessSample> samples,
                      std::span<const double> x, const FitConfig& cfg,
                      FitDiagnostics* diag) {
  return fit_tau_global(prepare_samples(samples, cfg.constraints.window, cfg.nu), x,
                        cfg, diag);
}

ConditionalIntensityFit fit_intensity_global(std::span<const PointProcessSample> samples,
                                             std::span<const double> x,
                                             const FitConfig& cfg) {
  return fit_intensity_global(prepare_samples(samples, cfg.constraints.window, cfg.nu),
                              x, cfg);
}

}  // namespace coxreg
