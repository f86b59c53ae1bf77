#include "coxreg/evaluation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

#include "coxreg/errors.hpp"
#include "coxreg/parallel.hpp"
#include "coxreg/projection.hpp"
#include "coxreg/rng.hpp"

namespace coxreg {

namespace {

constexpr std::uint64_t kSimTag = 0x657870;     // per-replicate dataset seeds
constexpr std::uint64_t kOracleTag = 0x6f7263;  // per-grid-point oracle seeds

struct OracleCurves {
  std::vector<QuantileCurve> shape;
  std::vector<double> tau;
};

const TauModel& tau_model(const ExperimentConfig& cfg) {
  return cfg.generator == Generator::lqd ? cfg.lqd.tau : cfg.truncnorm.tau;
}

QuantileCurve oracle_shape_at(const ExperimentConfig& cfg, double x,
                              std::uint64_t seed) {
  if (cfg.mode == FitMode::local) {
    return cfg.generator == Generator::lqd
               ? oracle_shape(x, cfg.lqd, cfg.oracle_reps, seed)
               : oracle_shape(x, cfg.truncnorm, cfg.oracle_reps, seed);
  }
  const WeightedShapeAverage avg =
      cfg.generator == Generator::lqd
          ? oracle_shape_global(x, cfg.lqd, cfg.oracle_reps, seed)
          : oracle_shape_global(x, cfg.truncnorm, cfg.oracle_reps, seed);
  const auto res = project_quantile(avg.values, cfg.fit.constraints);
  return interpolate_solution(res.q, cfg.fit.constraints.window);
}

OracleCurves build_oracles(const ExperimentConfig& cfg,
                           const std::vector<double>& grid) {
  OracleCurves oc;
  oc.tau.resize(grid.size());
  for (std::size_t g = 0; g < grid.size(); ++g)
    oc.tau[g] = oracle_tau(grid[g], tau_model(cfg));
  std::vector<std::vector<QuantileCurve>> slots(grid.size());
  parallel_for(grid.size(), cfg.threads, [&](std::size_t g) {
    slots[g].push_back(
        oracle_shape_at(cfg, grid[g], rng::derive_key(cfg.seed, kOracleTag, g)));
  });
  oc.shape.reserve(grid.size());
  for (auto& s : slots) oc.shape.push_back(std::move(s.front()));
  return oc;
}

void validate(const ExperimentConfig& cfg) {
  if (cfg.n_values.empty()) throw ConfigError("no sample sizes given");
  for (int n : cfg.n_values)
    if (n < 2) throw ConfigError("sample sizes must be at least 2");
  if (cfg.replicates < 1) throw ConfigError("need at least one replicate");
  if (cfg.eval_grid < 2) throw ConfigError("evaluation grid needs at least 2 points");
  if (cfg.oracle_reps < 1) throw ConfigError("oracle needs at least one draw");
  const double gen_window =
      cfg.generator == Generator::lqd ? cfg.lqd.window : cfg.truncnorm.window;
  if (gen_window != cfg.fit.constraints.window)
    throw ConfigError("generator window and fit window differ");
  if (cfg.mode == FitMode::local) {
    for (int n : cfg.n_values) {
      const double h = bandwidth_for(cfg, n);
      if (!(h > 0.0) || h >= 0.5)
        throw ConfigError("local bandwidth must stay inside (0, 0.5) to leave an "
                          "interior evaluation interval");
    }
  }
}

}  // namespace

Generator generator_from_name(const std::string& name) {
  if (name == "lqd") return Generator::lqd;
  if (name == "truncnorm") return Generator::truncnorm;
  throw ConfigError("unknown generator '" + name + "' (expected lqd or truncnorm)");
}

const char* generator_name(Generator g) {
  return g == Generator::lqd ? "lqd" : "truncnorm";
}

double alpha_for(const ExperimentConfig& cfg, int n) {
  return cfg.alpha_rule == AlphaRule::scaled ? 40.0 * std::pow(n, 0.8)
                                             : cfg.alpha_fixed;
}

double bandwidth_for(const ExperimentConfig& cfg, int n) {
  return cfg.bandwidth_rule == BandwidthRule::scaled ? std::pow(n, -0.2)
                                                     : cfg.bandwidth_fixed;
}

double ise_shape(std::span<const double> grid, const std::vector<QuantileCurve>& fit,
                 const std::vector<QuantileCurve>& oracle) {
  if (grid.size() < 2) throw ConfigError("integration grid needs at least 2 points");
  if (fit.size() != grid.size() || oracle.size() != grid.size())
    throw ConfigError("curve count does not match the grid");
  std::vector<double> sq(grid.size());
  for (std::size_t g = 0; g < grid.size(); ++g) {
    const double d = wasserstein_distance(fit[g], oracle[g]);
    sq[g] = d * d;
  }
  double acc = 0.0;
  for (std::size_t g = 0; g + 1 < grid.size(); ++g)
    acc += 0.5 * (sq[g] + sq[g + 1]) * (grid[g + 1] - grid[g]);
  return acc;
}

double ise_tau(std::span<const double> grid, std::span<const double> fit_tau_rel,
               std::span<const double> oracle, double expected_tau_value) {
  if (grid.size() < 2) throw ConfigError("integration grid needs at least 2 points");
  if (fit_tau_rel.size() != grid.size() || oracle.size() != grid.size())
    throw ConfigError("value count does not match the grid");
  if (!(expected_tau_value > 0.0)) throw ConfigError("expected tau must be positive");
  double acc = 0.0;
  auto sq = [&](std::size_t g) {
    const double e = expected_tau_value * fit_tau_rel[g] - oracle[g];
    return e * e;
  };
  for (std::size_t g = 0; g + 1 < grid.size(); ++g)
    acc += 0.5 * (sq(g) + sq(g + 1)) * (grid[g + 1] - grid[g]);
  return acc;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  validate(cfg);

  ExperimentResult out;
  out.trim_lo = 0.0;
  out.trim_hi = 1.0;
  if (cfg.mode == FitMode::local) {
    // one shared grid, trimmed by the widest bandwidth in the ladder, so the
    // errors are integrated over the same interval for every n
    double hmax = 0.0;
    for (int n : cfg.n_values) hmax = std::max(hmax, bandwidth_for(cfg, n));
    out.trim_lo = hmax;
    out.trim_hi = 1.0 - hmax;
  }
  out.x_grid.resize(cfg.eval_grid);
  for (int g = 0; g < cfg.eval_grid; ++g)
    out.x_grid[g] = out.trim_lo + (out.trim_hi - out.trim_lo) *
                                      (static_cast<double>(g + 1) / (cfg.eval_grid + 1));

  const OracleCurves oracles = build_oracles(cfg, out.x_grid);
  const double etau = expected_tau(tau_model(cfg));

  const std::size_t jobs =
      cfg.n_values.size() * static_cast<std::size_t>(cfg.replicates);
  out.rows.resize(jobs);

  parallel_for(jobs, cfg.threads, [&](std::size_t j) {
    const int n_idx = static_cast<int>(j / cfg.replicates);
    const int rep = static_cast<int>(j % cfg.replicates);
    const int n = cfg.n_values[n_idx];

    ReplicateResult row;
    row.n = n;
    row.alpha = alpha_for(cfg, n);
    row.replicate = rep;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      const std::uint64_t dseed = rng::derive_key(
          cfg.seed, kSimTag,
          (static_cast<std::uint64_t>(n_idx) << 32) | static_cast<std::uint64_t>(rep));
      SimulatedDataset data;
      if (cfg.generator == Generator::lqd) {
        LqdSimConfig gen = cfg.lqd;
        gen.alpha = row.alpha;
        data = simulate_lqd(n, gen, dseed);
      } else {
        TruncNormSimConfig gen = cfg.truncnorm;
        gen.alpha = row.alpha;
        data = simulate_truncnorm(n, gen, dseed);
      }
      const PreparedSamples ps =
          prepare_samples(data.samples, cfg.fit.constraints.window, cfg.fit.nu);
      data.samples.clear();
      data.samples.shrink_to_fit();

      FitConfig fc = cfg.fit;
      fc.bandwidth = bandwidth_for(cfg, n);

      std::vector<QuantileCurve> shapes;
      shapes.reserve(out.x_grid.size());
      std::vector<double> taus(out.x_grid.size());
      for (std::size_t g = 0; g < out.x_grid.size(); ++g) {
        const double x = out.x_grid[g];
        if (cfg.mode == FitMode::local) {
          shapes.push_back(fit_shape_local(ps, x, fc));
          taus[g] = fit_tau_local(ps, x, fc);
        } else {
          const double xv[1] = {x};
          shapes.push_back(fit_shape_global(ps, xv, fc));
          taus[g] = fit_tau_global(ps, xv, fc);
        }
      }
      row.ise_shape = ise_shape(out.x_grid, shapes, oracles.shape);
      row.ise_tau = ise_tau(out.x_grid, taus, oracles.tau, etau);
    } catch (const std::exception& e) {
      row.error = e.what();
      row.ise_shape = std::numeric_limits<double>::quiet_NaN();
      row.ise_tau = std::numeric_limits<double>::quiet_NaN();
    }
    row.wall_ms = std::chrono::duration<double, std::milli>(
                      std::chrono::steady_clock::now() - t0)
                      .count();
    out.rows[j] = std::move(row);
  });

  return out;
}

}  // namespace coxreg
