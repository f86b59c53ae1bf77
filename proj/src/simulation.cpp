#include "coxreg/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "coxreg/errors.hpp"

namespace coxreg {

namespace {

// stream tags; arbitrary distinct constants
constexpr std::uint64_t kReplicateTag = 0x7265706c;  // dataset replicates
constexpr std::uint64_t kOracleTag = 0x6f7261636c;   // oracle draws

constexpr double kLogSlopeCap = 50.0;

double truncnorm_mean(double sigma, double lo, double hi) {
  if (sigma == 0.0) return std::clamp(0.0, lo, hi);
  const double a = lo / sigma, b = hi / sigma;
  const double pa = rng::normal_cdf(a), pb = rng::normal_cdf(b);
  if (!(pb - pa > 0.0)) return 0.5 * (lo + hi);
  const double inv_sqrt2pi = 0.3989422804014326779;
  const double da = inv_sqrt2pi * std::exp(-0.5 * a * a);
  const double db = inv_sqrt2pi * std::exp(-0.5 * b * b);
  return sigma * (da - db) / (pb - pa);
}

void validate_tau(const TauModel& m) {
  if (!(m.noise_lo < m.noise_hi)) throw ConfigError("tau noise bounds out of order");
  if (m.noise_sd < 0.0) throw ConfigError("tau noise sd must be nonnegative");
  const double worst = m.intercept + std::min(0.0, m.slope) + m.noise_lo;
  if (!(worst > 0.0))
    throw ConfigError("tau model admits nonpositive factors over the covariate range");
}

void validate_lqd(const LqdSimConfig& cfg) {
  validate_tau(cfg.tau);
  if (!(cfg.window > 0.0)) throw ConfigError("window must be positive");
  if (!(cfg.alpha > 0.0)) throw ConfigError("alpha must be positive");
  if (cfg.grid < 2) throw ConfigError("latent grid too small");
  if (!cfg.mean_fn) throw ConfigError("mean function not set");
  if (cfg.component_fns.size() != cfg.variance_fns.size())
    throw ConfigError("component and variance function counts differ");
  // numeric orthonormality check, midpoint rule
  const int kq = 2048;
  for (std::size_t j = 0; j < cfg.component_fns.size(); ++j) {
    for (std::size_t k = j; k < cfg.component_fns.size(); ++k) {
      double acc = 0.0;
      for (int i = 0; i < kq; ++i) {
        const double s = (i + 0.5) / kq;
        acc += cfg.component_fns[j](s) * cfg.component_fns[k](s);
      }
      acc /= kq;
      const double want = j == k ? 1.0 : 0.0;
      if (std::fabs(acc - want) > 1e-3)
        throw ConfigError("shape components are not orthonormal on [0,1]");
    }
  }
}

void validate_truncnorm(const TruncNormSimConfig& cfg) {
  validate_tau(cfg.tau);
  if (!(cfg.window > 0.0)) throw ConfigError("window must be positive");
  if (!(cfg.alpha > 0.0)) throw ConfigError("alpha must be positive");
  if (cfg.grid < 2) throw ConfigError("latent grid too small");
  if (!(cfg.mean_noise_lo <= cfg.mean_noise_hi) ||
      !(cfg.sd_noise_lo <= cfg.sd_noise_hi))
    throw ConfigError("noise bounds out of order");
  const double worst_sd =
      cfg.sd_intercept + std::min(0.0, cfg.sd_slope) + cfg.sd_noise_lo;
  if (!(worst_sd > 0.0))
    throw ConfigError("latent sd model admits nonpositive values");
}

double draw_tau(rng::Stream& s, const TauModel& m, double x) {
  return m.intercept + m.slope * x +
         s.truncated_normal(0.0, m.noise_sd, m.noise_lo, m.noise_hi);
}

// Latent log-slope tabulation on the interior grid at covariate x; the score
// draws consume exactly K normals.
std::vector<double> draw_lqd_curve(rng::Stream& s, const LqdSimConfig& cfg, double x) {
  const std::size_t K = cfg.component_fns.size();
  std::vector<double> xi(K);
  for (std::size_t k = 0; k < K; ++k) {
    const double var = cfg.variance_fns[k](x);
    if (!(var >= 0.0)) throw ConfigError("negative score variance");
    xi[k] = s.normal(0.0, std::sqrt(var));
  }
  std::vector<double> c(cfg.grid);
  for (int j = 0; j < cfg.grid; ++j) {
    const double sj = static_cast<double>(j + 1) / (cfg.grid + 1);
    double v = cfg.mean_fn(sj, x);
    for (std::size_t k = 0; k < K; ++k) v += xi[k] * cfg.component_fns[k](sj);
    c[j] = v;
  }
  return c;
}

QuantileCurve draw_lqd_quantile(rng::Stream& s, const LqdSimConfig& cfg, double x) {
  return lqd_inverse(draw_lqd_curve(s, cfg, x), cfg.window);
}

// Truncated-normal latent quantile at covariate x; consumes two truncated
// normals (mean noise, sd noise) in that order.
QuantileCurve draw_truncnorm_quantile(rng::Stream& s, const TruncNormSimConfig& cfg,
                                      double x) {
  const double mu = cfg.mean_intercept + cfg.mean_slope * x +
                    s.truncated_normal(0.0, cfg.mean_noise_sd, cfg.mean_noise_lo,
                                       cfg.mean_noise_hi);
  const double sd = cfg.sd_intercept + cfg.sd_slope * x +
                    s.truncated_normal(0.0, cfg.sd_noise_sd, cfg.sd_noise_lo,
                                       cfg.sd_noise_hi);
  if (!(sd > 0.0)) throw NumericError("latent sd collapsed to zero");
  const double T = cfg.window;
  const double pa = rng::normal_cdf((0.0 - mu) / sd);
  const double pb = rng::normal_cdf((T - mu) / sd);
  if (!(pb - pa > 0.0)) throw NumericError("latent distribution has no mass in window");
  std::vector<double> q(cfg.grid);
  for (int j = 0; j < cfg.grid; ++j) {
    const double r = static_cast<double>(j + 1) / (cfg.grid + 1);
    double v = mu + sd * rng::normal_quantile(pa + r * (pb - pa));
    // guard rounding at the ends; the open-interval invariant is structural
    v = std::min(std::max(v, T * 1e-12), T * (1.0 - 1e-12));
    q[j] = v;
  }
  return QuantileCurve(T, std::move(q));
}

std::vector<double> draw_arrivals(rng::Stream& s, const QuantileCurve& q,
                                  std::int64_t count) {
  std::vector<double> a(count);
  for (std::int64_t k = 0; k < count; ++k) a[k] = q(s.u01());
  std::sort(a.begin(), a.end());
  return a;
}

template <class Cfg, class DrawQuantile>
SimulatedDataset simulate_impl(int n, const Cfg& cfg, std::uint64_t seed,
                               DrawQuantile&& draw_quantile) {
  if (n < 0) throw ConfigError("negative sample count");
  SimulatedDataset out;
  out.window = cfg.window;
  out.alpha = cfg.alpha;
  out.seed = seed;
  out.samples.reserve(n);
  out.latent.reserve(n);
  for (int i = 0; i < n; ++i) {
    rng::Stream s(rng::derive_key(seed, kReplicateTag, static_cast<std::uint64_t>(i)));
    const double x = s.u01();
    const double tau = draw_tau(s, cfg.tau, x);
    QuantileCurve q = draw_quantile(s, cfg, x);
    const std::int64_t count = s.poisson(cfg.alpha * tau);
    out.samples.push_back({draw_arrivals(s, q, count), {x}});
    out.latent.push_back({tau, std::move(q)});
  }
  return out;
}

template <class Cfg, class DrawQuantile>
QuantileCurve oracle_shape_impl(double x, const Cfg& cfg, int reps, std::uint64_t seed,
                                DrawQuantile&& draw_quantile) {
  if (reps < 1) throw ConfigError("oracle needs at least one draw");
  std::vector<double> acc(cfg.grid, 0.0);
  for (int r = 0; r < reps; ++r) {
    rng::Stream s(rng::derive_key(seed, kOracleTag, static_cast<std::uint64_t>(r)));
    const QuantileCurve q = draw_quantile(s, cfg, x);
    const auto& v = q.values();
    for (int j = 0; j < cfg.grid; ++j) acc[j] += v[j];
  }
  for (double& v : acc) v /= reps;
  return QuantileCurve(cfg.window, std::move(acc));
}

template <class Cfg, class DrawQuantile>
WeightedShapeAverage oracle_shape_global_impl(double x, const Cfg& cfg, int reps,
                                              std::uint64_t seed,
                                              DrawQuantile&& draw_quantile) {
  if (reps < 1) throw ConfigError("oracle needs at least one draw");
  WeightedShapeAverage out;
  out.window = cfg.window;
  out.values.assign(cfg.grid, 0.0);
  for (int r = 0; r < reps; ++r) {
    rng::Stream s(rng::derive_key(seed, kOracleTag, static_cast<std::uint64_t>(r)));
    const double xr = s.u01();
    const QuantileCurve q = draw_quantile(s, cfg, xr);
    // population weight for X ~ U(0,1): mean 1/2, variance 1/12
    const double w = 1.0 + 12.0 * (xr - 0.5) * (x - 0.5);
    const auto& v = q.values();
    for (int j = 0; j < cfg.grid; ++j) out.values[j] += w * v[j];
  }
  for (double& v : out.values) v /= reps;
  out.monotone = std::is_sorted(out.values.begin(), out.values.end()) &&
                 out.values.front() > 0.0 && out.values.back() < cfg.window;
  return out;
}

}  // namespace

double oracle_tau(double x, const TauModel& m) {
  return m.intercept + m.slope * x + truncnorm_mean(m.noise_sd, m.noise_lo, m.noise_hi);
}

double expected_tau(const TauModel& m) { return oracle_tau(0.5, m); }

LqdSimConfig default_lqd_config(bool sqrt_variances) {
  LqdSimConfig cfg;
  cfg.mean_fn = [](double s, double x) {
    return std::exp(1.5 * x) + std::exp(1.5 * s);
  };
  cfg.component_fns = {
      [](double s) { return -std::sqrt(2.0) * std::cos(M_PI * s); },
      [](double s) { return std::sqrt(2.0) * std::sin(M_PI * s); },
  };
  cfg.variance_fns = {
      [](double x) { return 3.0 + 2.0 * x; },
      [](double x) { return (2.0 - x) * (2.0 - x); },
  };
  if (sqrt_variances) {
    for (auto& f : cfg.variance_fns)
      f = [inner = f](double x) { return std::sqrt(inner(x)); };
  }
  return cfg;
}

TruncNormSimConfig default_truncnorm_config() { return {}; }

TruncNormSimConfig truncnorm_shift_config() {
  TruncNormSimConfig cfg;
  cfg.mean_intercept = 1.0 / 3.0;
  cfg.mean_slope = 1.0 / 3.0;
  cfg.sd_intercept = 0.05;
  cfg.sd_slope = 0.0;
  cfg.mean_noise_sd = 3.0;
  cfg.mean_noise_lo = -0.15;
  cfg.mean_noise_hi = 0.15;
  cfg.sd_noise_sd = 0.0;
  return cfg;
}

QuantileCurve lqd_inverse(const std::vector<double>& values, double window) {
  const int g = static_cast<int>(values.size());
  if (g < 2) throw ConfigError("log-slope tabulation too short");
  if (!(window > 0.0)) throw ConfigError("window must be positive");
  std::vector<double> e(g);
  for (int j = 0; j < g; ++j) {
    if (!std::isfinite(values[j]) || std::fabs(values[j]) > kLogSlopeCap)
      throw NumericError("log slope out of range at grid point " + std::to_string(j));
    e[j] = std::exp(values[j]);
  }
  // cumulative integral at the knots; constant stubs at both ends
  const double dr = 1.0 / (g + 1);
  std::vector<double> cum(g);
  cum[0] = e[0] * dr;
  for (int j = 1; j < g; ++j) cum[j] = cum[j - 1] + 0.5 * (e[j - 1] + e[j]) * dr;
  const double total = cum[g - 1] + e[g - 1] * dr;
  std::vector<double> q(g);
  for (int j = 0; j < g; ++j) q[j] = window * cum[j] / total;
  return QuantileCurve(window, std::move(q));
}

SimulatedDataset simulate_lqd(int n, const LqdSimConfig& cfg, std::uint64_t seed) {
  validate_lqd(cfg);
  return simulate_impl(n, cfg, seed,
                       [](rng::Stream& s, const LqdSimConfig& c, double x) {
                         return draw_lqd_quantile(s, c, x);
                       });
}

SimulatedDataset simulate_truncnorm(int n, const TruncNormSimConfig& cfg,
                                    std::uint64_t seed) {
  validate_truncnorm(cfg);
  return simulate_impl(n, cfg, seed,
                       [](rng::Stream& s, const TruncNormSimConfig& c, double x) {
                         return draw_truncnorm_quantile(s, c, x);
                       });
}

QuantileCurve oracle_shape(double x, const LqdSimConfig& cfg, int reps,
                           std::uint64_t seed) {
  validate_lqd(cfg);
  return oracle_shape_impl(x, cfg, reps, seed,
                           [](rng::Stream& s, const LqdSimConfig& c, double xv) {
                             return draw_lqd_quantile(s, c, xv);
                           });
}

QuantileCurve oracle_shape(double x, const TruncNormSimConfig& cfg, int reps,
                           std::uint64_t seed) {
  validate_truncnorm(cfg);
  return oracle_shape_impl(x, cfg, reps, seed,
                           [](rng::Stream& s, const TruncNormSimConfig& c, double xv) {
                             return draw_truncnorm_quantile(s, c, xv);
                           });
}

WeightedShapeAverage oracle_shape_global(double x, const LqdSimConfig& cfg, int reps,
                                         std::uint64_t seed) {
  validate_lqd(cfg);
  return oracle_shape_global_impl(x, cfg, reps, seed,
                                  [](rng::Stream& s, const LqdSimConfig& c, double xv) {
                                    return draw_lqd_quantile(s, c, xv);
                                  });
}

WeightedShapeAverage oracle_shape_global(double x, const TruncNormSimConfig& cfg,
                                         int reps, std::uint64_t seed) {
  validate_truncnorm(cfg);
  return oracle_shape_global_impl(
      x, cfg, reps, seed, [](rng::Stream& s, const TruncNormSimConfig& c, double xv) {
        return draw_truncnorm_quantile(s, c, xv);
      });
}

}  // namespace coxreg
