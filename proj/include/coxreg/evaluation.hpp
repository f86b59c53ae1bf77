#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "coxreg/core.hpp"
#include "coxreg/regression.hpp"
#include "coxreg/simulation.hpp"

// Replicated simulation experiments: generate a dataset, fit every point of
// an x-grid, and score integrated squared errors of the shape and intensity
// factor parts against Monte Carlo oracle curves. Oracle curves are built
// once per experiment and shared across sample sizes and replicates;
// replicates run in parallel without affecting any numbers.

namespace coxreg {

enum class Generator { lqd, truncnorm };
Generator generator_from_name(const std::string& name);
const char* generator_name(Generator g);

// alpha(n): scaled follows 40 n^(4/5); fixed keeps a constant value (the
// negative-control setting where consistency is expected to fail).
enum class AlphaRule { scaled, fixed };

// h(n): scaled follows n^(-1/5); fixed keeps a constant bandwidth.
enum class BandwidthRule { scaled, fixed };

struct ExperimentConfig {
  Generator generator = Generator::lqd;
  FitMode mode = FitMode::local;
  std::vector<int> n_values;
  int replicates = 100;
  AlphaRule alpha_rule = AlphaRule::scaled;
  double alpha_fixed = 1.0;
  BandwidthRule bandwidth_rule = BandwidthRule::scaled;
  double bandwidth_fixed = 0.0;
  FitConfig fit;
  LqdSimConfig lqd = default_lqd_config();
  TruncNormSimConfig truncnorm = default_truncnorm_config();
  int eval_grid = 50;
  int oracle_reps = 2000;
  std::uint64_t seed = 1;
  int threads = 0;  // 0 -> hardware concurrency
};

double alpha_for(const ExperimentConfig& cfg, int n);
double bandwidth_for(const ExperimentConfig& cfg, int n);

struct ReplicateResult {
  int n = 0;
  double alpha = 0.0;
  int replicate = 0;
  double ise_shape = 0.0;
  double ise_tau = 0.0;
  double wall_ms = 0.0;
  std::string error;  // nonempty when the replicate failed; ISEs are NaN then
};

struct ExperimentResult {
  std::vector<double> x_grid;  // shared across all n (trimmed for local mode)
  double trim_lo = 0.0;
  double trim_hi = 1.0;
  std::vector<ReplicateResult> rows;  // ordered by (n, replicate)
};

// Trapezoid integral over the x-grid of the squared quantile-space distance
// between fitted and oracle curves (one curve per grid point each).
double ise_shape(std::span<const double> grid, const std::vector<QuantileCurve>& fit,
                 const std::vector<QuantileCurve>& oracle);

// Trapezoid integral of (expected_tau * fit - oracle)^2: the standardized
// fits are put back on the oracle scale by the known mean factor.
double ise_tau(std::span<const double> grid, std::span<const double> fit_tau_rel,
               std::span<const double> oracle, double expected_tau_value);

ExperimentResult run_experiment(const ExperimentConfig& cfg);

}  // namespace coxreg
