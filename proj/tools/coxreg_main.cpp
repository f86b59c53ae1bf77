#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "coxreg/errors.hpp"
#include "coxreg/evaluation.hpp"
#include "coxreg/io.hpp"
#include "coxreg/parallel.hpp"
#include "coxreg/regression.hpp"
#include "coxreg/simulation.hpp"
#include "coxreg/version.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;
using namespace coxreg;

namespace {

int thread_count(int flag_value) {
  if (flag_value > 0) return flag_value;
  if (const char* env = std::getenv("COXREG_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  return 0;  // library default: hardware concurrency
}

// ---------------------------------------------------------------- simulate

struct SimulateArgs {
  std::string preset = "lqd";
  int n = 100;
  double alpha = 0.0;  // 0: 40 n^(4/5)
  std::uint64_t seed = 1;
  double window = 1.0;
  int grid = 100;
  bool sqrt_variances = false;
  std::string out = ".";
};

int run_simulate(const SimulateArgs& a) {
  SimulatedDataset data;
  const double alpha = a.alpha > 0.0 ? a.alpha : 40.0 * std::pow(a.n, 0.8);
  if (a.preset == "lqd") {
    LqdSimConfig cfg = default_lqd_config(a.sqrt_variances);
    cfg.window = a.window;
    cfg.alpha = alpha;
    cfg.grid = a.grid;
    data = simulate_lqd(a.n, cfg, a.seed);
  } else if (a.preset == "truncnorm" || a.preset == "truncnorm-shift") {
    TruncNormSimConfig cfg = a.preset == "truncnorm" ? default_truncnorm_config()
                                                     : truncnorm_shift_config();
    cfg.window = a.window;
    cfg.alpha = alpha;
    cfg.grid = a.grid;
    data = simulate_truncnorm(a.n, cfg, a.seed);
  } else {
    throw ConfigError("unknown preset '" + a.preset +
                      "' (expected lqd, truncnorm or truncnorm-shift)");
  }
  fs::create_directories(a.out);
  write_events_csv((fs::path(a.out) / "events.csv").string(), data.samples);
  write_replicates_csv((fs::path(a.out) / "replicates.csv").string(), data.samples);
  write_latent_csv((fs::path(a.out) / "latent.csv").string(), data);
  std::size_t total = 0;
  for (const auto& s : data.samples) total += s.arrivals.size();
  std::cout << "wrote " << data.samples.size() << " replicates, " << total
            << " arrivals to " << a.out << "\n";
  return 0;
}

// --------------------------------------------------------------------- fit

struct FitArgs {
  std::string events;
  std::string replicates;
  double window = 0.0;
  std::string mode = "local";
  double bandwidth = 0.0;
  std::string kernel = "epanechnikov";
  int nu = 100;
  double lower_slack = 1e-10;
  double upper_slack = 1e10;
  int density_grid = 512;
  double density_bandwidth = 0.0;
  std::string xs;
  int x_grid = 0;
  int threads = 0;
  std::string out;
};

std::vector<std::vector<double>> parse_points(const std::string& text, int p) {
  std::vector<std::vector<double>> points;
  std::string group;
  std::stringstream groups(text);
  while (std::getline(groups, group, ';')) {
    std::vector<double> point;
    std::string cell;
    std::stringstream cells(group);
    while (std::getline(cells, cell, ',')) {
      try {
        std::size_t used = 0;
        const double v = std::stod(cell, &used);
        if (used != cell.size()) throw std::invalid_argument(cell);
        point.push_back(v);
      } catch (const std::exception&) {
        throw ConfigError("cannot parse covariate value '" + cell + "'");
      }
    }
    if (point.empty()) continue;
    if (p == 1) {
      // comma-separated scalars are a list of points
      for (double v : point) points.push_back({v});
    } else {
      if (static_cast<int>(point.size()) != p)
        throw ConfigError("covariate point has " + std::to_string(point.size()) +
                          " components, data has p=" + std::to_string(p));
      points.push_back(std::move(point));
    }
  }
  if (points.empty()) throw ConfigError("no evaluation points given");
  return points;
}

int run_fit(const FitArgs& a) {
  if (!(a.window > 0.0)) throw ConfigError("--window must be positive");
  const FitMode mode = fit_mode_from_name(a.mode);
  if (mode == FitMode::local && !(a.bandwidth > 0.0))
    throw ConfigError("local mode needs --bandwidth > 0");
  if (a.xs.empty() == (a.x_grid == 0))
    throw ConfigError("give exactly one of --xs and --x-grid");

  FitConfig cfg;
  cfg.bandwidth = a.bandwidth;
  cfg.kernel = kern::kernel_family_from_name(a.kernel.c_str());
  cfg.nu = a.nu;
  cfg.constraints = {a.window, a.lower_slack, a.upper_slack};
  cfg.density_grid = a.density_grid;
  cfg.density_bandwidth = a.density_bandwidth;

  const auto samples = read_events_csv(a.events, a.replicates, a.window);
  const PreparedSamples ps = prepare_samples(samples, a.window, cfg.nu);

  std::vector<std::vector<double>> points;
  if (!a.xs.empty()) {
    points = parse_points(a.xs, ps.p);
  } else {
    if (ps.p != 1)
      throw ConfigError("--x-grid needs a scalar covariate; use --xs for p=" +
                        std::to_string(ps.p));
    double lo = ps.covariates[0], hi = ps.covariates[0];
    for (double x : ps.covariates) {
      lo = std::min(lo, x);
      hi = std::max(hi, x);
    }
    if (mode == FitMode::local) {
      lo += cfg.bandwidth;
      hi -= cfg.bandwidth;
    }
    if (!(lo < hi))
      throw ConfigError("covariate range is empty after bandwidth trimming");
    for (int g = 1; g <= a.x_grid; ++g)
      points.push_back({lo + (hi - lo) * g / (a.x_grid + 1)});
  }

  struct PointOutcome {
    std::optional<ConditionalIntensityFit> fit;
    std::string error;
  };
  std::vector<PointOutcome> outcomes(points.size());
  parallel_for(points.size(), thread_count(a.threads), [&](std::size_t i) {
    try {
      outcomes[i].fit = mode == FitMode::local
                            ? fit_intensity_local(ps, points[i][0], cfg)
                            : fit_intensity_global(ps, points[i], cfg);
    } catch (const std::exception& e) {
      outcomes[i].error = e.what();
    }
  });

  ordered_json doc;
  doc["version"] = COXREG_VERSION;
  doc["config"] = {{"events", a.events},
                   {"replicates", a.replicates},
                   {"window", a.window},
                   {"mode", a.mode},
                   {"bandwidth", a.bandwidth},
                   {"kernel", a.kernel},
                   {"nu", a.nu},
                   {"lower_slack", a.lower_slack},
                   {"upper_slack", a.upper_slack},
                   {"density_grid", a.density_grid},
                   {"density_bandwidth", a.density_bandwidth}};
  doc["n_samples"] = ps.n;
  doc["p"] = ps.p;
  doc["points"] = ordered_json::array();
  for (std::size_t i = 0; i < points.size(); ++i) {
    ordered_json rec;
    rec["x"] = points[i];
    if (!outcomes[i].error.empty()) {
      rec["error"] = outcomes[i].error;
    } else {
      const auto& f = *outcomes[i].fit;
      rec["tau_rel"] = f.tau_rel;
      rec["quantile"] = f.shape_quantile.values();
      rec["density"] = f.shape_density.values();
      rec["diagnostics"] = {{"weight_support", f.diagnostics.weight_support},
                            {"tau_clamped", f.diagnostics.tau_clamped},
                            {"qp_iterations", f.diagnostics.qp_iterations},
                            {"qp_residual", f.diagnostics.qp_residual},
                            {"qp_fallback", f.diagnostics.qp_fallback}};
    }
    doc["points"].push_back(std::move(rec));
  }

  if (a.out.empty()) {
    std::cout << doc.dump(2) << "\n";
  } else {
    std::ofstream f(a.out, std::ios::binary);
    if (!f) throw DataError("cannot open '" + a.out + "' for writing");
    f << doc.dump(2) << "\n";
    f.flush();
    if (!f) throw DataError("failed writing '" + a.out + "'");
    std::size_t failed = 0;
    for (const auto& o : outcomes)
      if (!o.error.empty()) ++failed;
    std::cout << "fit " << points.size() - failed << "/" << points.size()
              << " points, output in " << a.out << "\n";
  }
  return 0;
}

// ---------------------------------------------------------------- evaluate

struct EvaluateArgs {
  std::string preset;
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> replicates;
  std::optional<int> oracle_reps;
  int threads = 0;
  std::string out = ".";
};

ExperimentConfig preset_experiment(const std::string& name) {
  ExperimentConfig cfg;
  if (name == "local-convergence") {
    cfg.generator = Generator::lqd;
    cfg.mode = FitMode::local;
    cfg.n_values = {100, 200, 500};
  } else if (name == "global-convergence") {
    cfg.generator = Generator::truncnorm;
    cfg.mode = FitMode::global;
    cfg.n_values = {100, 200, 500};
  } else if (name == "fixed-alpha-control") {
    cfg.generator = Generator::lqd;
    cfg.mode = FitMode::local;
    cfg.n_values = {1000, 2000, 5000};
    cfg.alpha_rule = AlphaRule::fixed;
    cfg.alpha_fixed = 1.0;
  } else {
    throw ConfigError("unknown preset '" + name +
                      "' (expected local-convergence, global-convergence or "
                      "fixed-alpha-control)");
  }
  return cfg;
}

ExperimentConfig parse_experiment_json(const ordered_json& j) {
  ExperimentConfig cfg;
  double window = 1.0;
  bool truncnorm_shift = false, sqrt_variances = false;
  for (const auto& [key, value] : j.items()) {
    if (key == "generator") cfg.generator = generator_from_name(value);
    else if (key == "mode") cfg.mode = fit_mode_from_name(value);
    else if (key == "n_values") cfg.n_values = value.get<std::vector<int>>();
    else if (key == "replicates") cfg.replicates = value;
    else if (key == "alpha") {
      if (value.is_string()) {
        if (value != "scaled") throw ConfigError("alpha must be a number or 'scaled'");
        cfg.alpha_rule = AlphaRule::scaled;
      } else {
        cfg.alpha_rule = AlphaRule::fixed;
        cfg.alpha_fixed = value;
      }
    } else if (key == "bandwidth") {
      if (value.is_string()) {
        if (value != "scaled")
          throw ConfigError("bandwidth must be a number or 'scaled'");
        cfg.bandwidth_rule = BandwidthRule::scaled;
      } else {
        cfg.bandwidth_rule = BandwidthRule::fixed;
        cfg.bandwidth_fixed = value;
      }
    } else if (key == "kernel")
      cfg.fit.kernel = kern::kernel_family_from_name(value.get<std::string>().c_str());
    else if (key == "nu") cfg.fit.nu = value;
    else if (key == "eval_grid") cfg.eval_grid = value;
    else if (key == "oracle_reps") cfg.oracle_reps = value;
    else if (key == "seed") cfg.seed = value;
    else if (key == "threads") cfg.threads = value;
    else if (key == "window") window = value;
    else if (key == "lower_slack") cfg.fit.constraints.lower_slack = value;
    else if (key == "upper_slack") cfg.fit.constraints.upper_slack = value;
    else if (key == "latent_grid") { cfg.lqd.grid = value; cfg.truncnorm.grid = value; }
    else if (key == "sqrt_score_variances") sqrt_variances = value;
    else if (key == "truncnorm_shift") truncnorm_shift = value;
    else throw ConfigError("unknown config key '" + key + "'");
  }
  if (sqrt_variances) {
    const int grid = cfg.lqd.grid;
    cfg.lqd = default_lqd_config(true);
    cfg.lqd.grid = grid;
  }
  if (truncnorm_shift) {
    auto shifted = truncnorm_shift_config();
    shifted.window = cfg.truncnorm.window;
    shifted.alpha = cfg.truncnorm.alpha;
    shifted.grid = cfg.truncnorm.grid;
    cfg.truncnorm = shifted;
  }
  cfg.fit.constraints.window = window;
  cfg.lqd.window = window;
  cfg.truncnorm.window = window;
  return cfg;
}

ordered_json experiment_json(const ExperimentConfig& cfg) {
  ordered_json j;
  j["generator"] = generator_name(cfg.generator);
  j["mode"] = fit_mode_name(cfg.mode);
  j["n_values"] = cfg.n_values;
  j["replicates"] = cfg.replicates;
  if (cfg.alpha_rule == AlphaRule::scaled) j["alpha"] = "scaled";
  else j["alpha"] = cfg.alpha_fixed;
  if (cfg.bandwidth_rule == BandwidthRule::scaled) j["bandwidth"] = "scaled";
  else j["bandwidth"] = cfg.bandwidth_fixed;
  j["kernel"] = kern::kernel_family_name(cfg.fit.kernel);
  j["nu"] = cfg.fit.nu;
  j["eval_grid"] = cfg.eval_grid;
  j["oracle_reps"] = cfg.oracle_reps;
  j["seed"] = cfg.seed;
  j["threads"] = cfg.threads;
  j["window"] = cfg.fit.constraints.window;
  j["lower_slack"] = cfg.fit.constraints.lower_slack;
  j["upper_slack"] = cfg.fit.constraints.upper_slack;
  return j;
}

int run_evaluate(const EvaluateArgs& a) {
  if (a.preset.empty() == a.config_path.empty())
    throw ConfigError("give exactly one of --preset and --config");
  ExperimentConfig cfg;
  if (!a.preset.empty()) {
    cfg = preset_experiment(a.preset);
  } else {
    std::ifstream f(a.config_path);
    if (!f) throw DataError("cannot open '" + a.config_path + "'");
    ordered_json j;
    try {
      j = ordered_json::parse(f);
    } catch (const nlohmann::json::parse_error& e) {
      throw ConfigError("cannot parse '" + a.config_path + "': " + e.what());
    }
    cfg = parse_experiment_json(j);
  }
  if (a.seed) cfg.seed = *a.seed;
  if (a.replicates) cfg.replicates = *a.replicates;
  if (a.oracle_reps) cfg.oracle_reps = *a.oracle_reps;
  cfg.threads = thread_count(a.threads > 0 ? a.threads : cfg.threads);

  const auto t0 = std::chrono::steady_clock::now();
  const ExperimentResult result = run_experiment(cfg);
  const double wall_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  fs::create_directories(a.out);
  const std::string results_path = (fs::path(a.out) / "results.csv").string();
  write_results_csv(results_path, result, cfg.generator, cfg.mode);

  ordered_json meta;
  meta["version"] = COXREG_VERSION;
  meta["config"] = experiment_json(cfg);
  meta["x_grid"] = result.x_grid;
  meta["trim"] = {{"lo", result.trim_lo}, {"hi", result.trim_hi}};
  meta["wall_seconds"] = wall_s;
  ordered_json failures = ordered_json::array();
  for (const auto& r : result.rows)
    if (!r.error.empty())
      failures.push_back(
          {{"n", r.n}, {"replicate", r.replicate}, {"error", r.error}});
  meta["failures"] = failures;
  const std::string meta_path = (fs::path(a.out) / "metadata.json").string();
  std::ofstream mf(meta_path, std::ios::binary);
  if (!mf) throw DataError("cannot open '" + meta_path + "' for writing");
  mf << meta.dump(2) << "\n";
  mf.flush();
  if (!mf) throw DataError("failed writing '" + meta_path + "'");

  std::cout << "wrote " << result.rows.size() << " rows to " << results_path << " ("
            << failures.size() << " failures, " << format_double(wall_s) << " s)\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Conditional intensity regression for replicated point processes"};
  app.set_version_flag("--version", std::string(COXREG_VERSION));
  app.require_subcommand(1);

  SimulateArgs sim;
  auto* cmd_sim = app.add_subcommand("simulate", "Generate a synthetic dataset");
  cmd_sim->add_option("--preset", sim.preset,
                      "Generator: lqd, truncnorm or truncnorm-shift");
  cmd_sim->add_option("--n", sim.n, "Number of replicates")->required();
  cmd_sim->add_option("--alpha", sim.alpha,
                      "Count rate multiplier (default: 40 n^(4/5))");
  cmd_sim->add_option("--seed", sim.seed, "Master seed");
  cmd_sim->add_option("--window", sim.window, "Observation window length");
  cmd_sim->add_option("--grid", sim.grid, "Latent quantile grid size");
  cmd_sim->add_flag("--sqrt-score-variances", sim.sqrt_variances,
                    "Alternative score-scale reading (lqd preset only)");
  cmd_sim->add_option("--out", sim.out, "Output directory");

  FitArgs fit;
  auto* cmd_fit = app.add_subcommand("fit", "Fit conditional intensities");
  cmd_fit->add_option("--events", fit.events, "events.csv path")->required();
  cmd_fit->add_option("--replicates", fit.replicates,
                      "replicates.csv path (optional)");
  cmd_fit->add_option("--window", fit.window, "Observation window length")->required();
  cmd_fit->add_option("--mode", fit.mode, "local or global");
  cmd_fit->add_option("--bandwidth", fit.bandwidth, "Kernel bandwidth (local mode)");
  cmd_fit->add_option("--kernel", fit.kernel,
                      "epanechnikov, triangular or quartic");
  cmd_fit->add_option("--nu", fit.nu, "Quantile grid size");
  cmd_fit->add_option("--lower-slack", fit.lower_slack,
                      "Lower bound factor for quantile increments");
  cmd_fit->add_option("--upper-slack", fit.upper_slack,
                      "Upper bound factor for quantile increments");
  cmd_fit->add_option("--density-grid", fit.density_grid,
                      "Density output grid size");
  cmd_fit->add_option("--density-bandwidth", fit.density_bandwidth,
                      "Density recovery bandwidth (0: auto)");
  cmd_fit->add_option("--xs", fit.xs,
                      "Evaluation points: comma list (p=1) or "
                      "semicolon-separated vectors");
  cmd_fit->add_option("--x-grid", fit.x_grid,
                      "Evaluation grid size over the covariate range (p=1)");
  cmd_fit->add_option("--threads", fit.threads, "Worker threads (0: auto)");
  cmd_fit->add_option("--out", fit.out, "Output JSON path (default: stdout)");

  EvaluateArgs ev;
  auto* cmd_ev = app.add_subcommand("evaluate", "Run a replicated experiment");
  cmd_ev->add_option("--preset", ev.preset,
                     "local-convergence, global-convergence or "
                     "fixed-alpha-control");
  cmd_ev->add_option("--config", ev.config_path, "Experiment config JSON");
  std::uint64_t seed_val = 0;
  auto* seed_opt = cmd_ev->add_option("--seed", seed_val, "Master seed override");
  int reps_val = 0;
  auto* reps_opt =
      cmd_ev->add_option("--replicates", reps_val, "Replicate count override");
  int oreps_val = 0;
  auto* oreps_opt =
      cmd_ev->add_option("--oracle-reps", oreps_val, "Oracle draw count override");
  cmd_ev->add_option("--threads", ev.threads, "Worker threads (0: auto)");
  cmd_ev->add_option("--out", ev.out, "Output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (cmd_sim->parsed()) return run_simulate(sim);
    if (cmd_fit->parsed()) return run_fit(fit);
    if (seed_opt->count()) ev.seed = seed_val;
    if (reps_opt->count()) ev.replicates = reps_val;
    if (oreps_opt->count()) ev.oracle_reps = oreps_val;
    return run_evaluate(ev);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 3;
  } catch (const NumericError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
