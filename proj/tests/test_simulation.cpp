#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "coxreg/core.hpp"
#include "coxreg/errors.hpp"
#include "coxreg/rng.hpp"
#include "coxreg/simulation.hpp"
#include "doctest.h"
#include "oracle_helpers.hpp"

using namespace coxreg;

namespace {

// Truncated-normal mean, the closed form used as test-side reference.
double tn_mean(double mu, double sd, double lo, double hi) {
  const double a = (lo - mu) / sd, b = (hi - mu) / sd;
  const auto phi = [](double z) {
    return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::acos(-1.0));
  };
  const double z = rng::normal_cdf(b) - rng::normal_cdf(a);
  return mu + sd * (phi(a) - phi(b)) / z;
}

// Analytic quantile of a normal(mu, sd) truncated to [0, window], at level r.
double tn_quantile(double r, double mu, double sd, double window) {
  const double pa = rng::normal_cdf((0.0 - mu) / sd);
  const double pb = rng::normal_cdf((window - mu) / sd);
  return mu + sd * rng::normal_quantile(pa + r * (pb - pa));
}

LqdSimConfig flat_lqd_config() {
  // No randomness in the latent curve: zero mean surface, no components.
  LqdSimConfig cfg;
  cfg.alpha = 60.0;
  cfg.mean_fn = [](double, double) { return 0.0; };
  return cfg;
}

}  // namespace

TEST_CASE("cumulative-exponential quantile map: flat log slope is uniform") {
  const int g = 99;
  for (double level : {0.0, 2.5}) {
    const QuantileCurve q = lqd_inverse(std::vector<double>(g, level), 1.0);
    const auto grid = interior_grid(g);
    for (int j = 0; j < g; ++j)
      CHECK(std::abs(q.values()[j] - grid[j]) <= 1e-12);
  }
  // Window scaling carries straight through.
  const QuantileCurve q2 = lqd_inverse(std::vector<double>(g, 0.0), 2.0);
  CHECK(q2.values()[49] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("cumulative-exponential quantile map: linear log slope closed form") {
  // With C(s) = s the quantile is (e^t - 1)/(e - 1);
  // at t = 1/2 that is 0.37754066879814546.
  const int g = 1999;
  std::vector<double> c(g);
  for (int j = 0; j < g; ++j) c[j] = static_cast<double>(j + 1) / (g + 1);
  const QuantileCurve q = lqd_inverse(c, 1.0);
  CHECK(std::abs(q.values()[999] - 0.37754066879814546) <= 1e-5);
  // Convexity: increments grow with t.
  for (int j = 1; j + 1 < g; ++j)
    CHECK(q.values()[j + 1] - q.values()[j] >= q.values()[j] - q.values()[j - 1] - 1e-12);
}

TEST_CASE("cumulative-exponential quantile map: input validation") {
  CHECK_THROWS_AS(lqd_inverse({0.0}, 1.0), ConfigError);
  CHECK_THROWS_AS(lqd_inverse({0.0, 0.0}, 0.0), ConfigError);
  std::vector<double> blown(10, 0.0);
  blown[3] = 60.0;  // overflow guard trips at |C| > 50
  try {
    lqd_inverse(blown, 1.0);
    FAIL("expected a numerical error");
  } catch (const NumericError& e) {
    CHECK(std::string(e.what()).find("3") != std::string::npos);
  }
  blown[3] = std::nan("");
  CHECK_THROWS_AS(lqd_inverse(blown, 1.0), NumericError);
}

TEST_CASE("log-quantile-slope generator: determinism and basic invariants") {
  LqdSimConfig cfg = default_lqd_config();
  cfg.alpha = 300.0;
  const SimulatedDataset a = simulate_lqd(40, cfg, 99u);
  const SimulatedDataset b = simulate_lqd(40, cfg, 99u);
  REQUIRE(a.samples.size() == 40);
  REQUIRE(a.latent.size() == 40);
  CHECK(a.window == 1.0);
  CHECK(a.alpha == 300.0);
  CHECK(a.seed == 99u);

  for (int i = 0; i < 40; ++i) {
    CHECK(a.samples[i].arrivals == b.samples[i].arrivals);
    CHECK(a.samples[i].x == b.samples[i].x);
    CHECK(a.latent[i].tau == b.latent[i].tau);
    CHECK(a.latent[i].quantile.values() == b.latent[i].quantile.values());

    const auto& t = a.samples[i].arrivals;
    CHECK(std::is_sorted(t.begin(), t.end()));
    if (!t.empty()) {
      CHECK(t.front() >= 0.0);
      CHECK(t.back() <= 1.0);
    }
    CHECK(a.samples[i].x.size() == 1);
    CHECK(a.samples[i].x[0] > 0.0);
    CHECK(a.samples[i].x[0] < 1.0);
    CHECK(a.latent[i].tau > 0.0);
  }

  // Different seeds decouple.
  const SimulatedDataset c = simulate_lqd(40, cfg, 100u);
  CHECK(a.samples[0].arrivals != c.samples[0].arrivals);

  CHECK(simulate_lqd(0, cfg, 1u).samples.empty());
  CHECK_THROWS_AS(simulate_lqd(-1, cfg, 1u), ConfigError);
}

TEST_CASE("log-quantile-slope generator: noise-free collapse") {
  // Zero mean surface, no score components, zero tau noise: the latent curve
  // is the uniform quantile and tau is exactly linear in the covariate.
  LqdSimConfig cfg = flat_lqd_config();
  cfg.tau.noise_sd = 0.0;
  const SimulatedDataset d = simulate_lqd(25, cfg, 5u);
  const auto grid = interior_grid(cfg.grid);
  for (int i = 0; i < 25; ++i) {
    const double x = d.samples[i].x[0];
    CHECK(std::abs(d.latent[i].tau - (1.0 + 0.2 * x)) <= 1e-14);
    for (int j = 0; j < cfg.grid; ++j)
      CHECK(std::abs(d.latent[i].quantile.values()[j] - grid[j]) <= 1e-12);
  }
}

TEST_CASE("log-quantile-slope generator: count scale matches the tau mean") {
  LqdSimConfig cfg = default_lqd_config();
  cfg.alpha = 200.0;
  const int n = 500;
  const SimulatedDataset d = simulate_lqd(n, cfg, 17u);
  double mean_ratio = 0.0;
  for (const auto& s : d.samples) mean_ratio += s.arrivals.size() / cfg.alpha / n;
  // E(N/alpha) = E(tau) = 1.1; sd of the average is about 0.0067.
  CHECK(std::abs(mean_ratio - 1.1) <= 0.02);
}

TEST_CASE("log-quantile-slope generator: rejects broken configurations") {
  SUBCASE("non-orthonormal components") {
    LqdSimConfig cfg = default_lqd_config();
    cfg.component_fns[1] = cfg.component_fns[0];
    CHECK_THROWS_AS(simulate_lqd(3, cfg, 1u), ConfigError);
  }
  SUBCASE("component and variance counts differ") {
    LqdSimConfig cfg = default_lqd_config();
    cfg.variance_fns.pop_back();
    CHECK_THROWS_AS(simulate_lqd(3, cfg, 1u), ConfigError);
  }
  SUBCASE("tau can go nonpositive") {
    LqdSimConfig cfg = default_lqd_config();
    cfg.tau.intercept = 0.1;
    CHECK_THROWS_AS(simulate_lqd(3, cfg, 1u), ConfigError);
  }
  SUBCASE("missing mean surface") {
    LqdSimConfig cfg = default_lqd_config();
    cfg.mean_fn = nullptr;
    CHECK_THROWS_AS(simulate_lqd(3, cfg, 1u), ConfigError);
  }
}

TEST_CASE("score scale reading switch") {
  // The alternative reading takes square roots of the two scale functions;
  // at x = 0.5 that changes the first score variance from 4 to 2.
  const LqdSimConfig a = default_lqd_config(false);
  const LqdSimConfig b = default_lqd_config(true);
  CHECK(a.variance_fns[0](0.5) == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(b.variance_fns[0](0.5) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(a.variance_fns[1](0.5) == doctest::Approx(2.25).epsilon(1e-12));
  CHECK(b.variance_fns[1](0.5) == doctest::Approx(1.5).epsilon(1e-12));
}

TEST_CASE("truncated-normal generator: noise-free latent curves are analytic") {
  TruncNormSimConfig cfg = default_truncnorm_config();
  cfg.mean_noise_sd = 0.0;
  cfg.sd_noise_sd = 0.0;
  cfg.alpha = 50.0;
  const SimulatedDataset d = simulate_truncnorm(30, cfg, 21u);
  const auto grid = interior_grid(cfg.grid);
  for (int i = 0; i < 30; ++i) {
    const double x = d.samples[i].x[0];
    const double mu = 0.3 + 0.4 * x;
    const double sd = 0.1 - 0.01 * x;
    for (int j = 0; j < cfg.grid; ++j) {
      const double expect = tn_quantile(grid[j], mu, sd, 1.0);
      CHECK(std::abs(d.latent[i].quantile.values()[j] - expect) <= 1e-12);
    }
    const auto& t = d.samples[i].arrivals;
    CHECK(std::is_sorted(t.begin(), t.end()));
    for (double v : t) {
      CHECK(v >= 0.0);
      CHECK(v <= 1.0);
    }
  }
}

TEST_CASE("truncated-normal generator: determinism and validation") {
  const TruncNormSimConfig cfg = default_truncnorm_config();
  const SimulatedDataset a = simulate_truncnorm(20, cfg, 8u);
  const SimulatedDataset b = simulate_truncnorm(20, cfg, 8u);
  for (int i = 0; i < 20; ++i) {
    CHECK(a.samples[i].arrivals == b.samples[i].arrivals);
    CHECK(a.latent[i].quantile.values() == b.latent[i].quantile.values());
  }

  TruncNormSimConfig bad = cfg;
  bad.sd_intercept = 0.005;  // sd noise can push the latent sd to zero
  CHECK_THROWS_AS(simulate_truncnorm(3, bad, 1u), ConfigError);
}

TEST_CASE("location-shift variant wiring") {
  const TruncNormSimConfig cfg = truncnorm_shift_config();
  CHECK(cfg.mean_intercept == doctest::Approx(1.0 / 3.0));
  CHECK(cfg.mean_slope == doctest::Approx(1.0 / 3.0));
  CHECK(cfg.sd_intercept == doctest::Approx(0.05));
  CHECK(cfg.sd_slope == 0.0);
  CHECK(cfg.mean_noise_sd == doctest::Approx(3.0));
  CHECK(cfg.mean_noise_lo == doctest::Approx(-0.15));
  CHECK(cfg.mean_noise_hi == doctest::Approx(0.15));
  CHECK(cfg.sd_noise_sd == 0.0);
  // The wide-noise mean model still simulates cleanly.
  const SimulatedDataset d = simulate_truncnorm(10, cfg, 3u);
  CHECK(d.samples.size() == 10);
}

TEST_CASE("truncated normal draws: degenerate and moment checks") {
  rng::Stream s(rng::derive_key(7u, 0x746eu));

  SUBCASE("zero sd clamps the mean into the support") {
    CHECK(s.truncated_normal(0.5, 0.0, -0.1, 0.1) == 0.1);
    CHECK(s.truncated_normal(-0.5, 0.0, -0.1, 0.1) == -0.1);
    CHECK(s.truncated_normal(0.05, 0.0, -0.1, 0.1) == 0.05);
  }

  SUBCASE("symmetric truncation keeps the mean") {
    const int m = 100000;
    double mean = 0.0;
    for (int i = 0; i < m; ++i) mean += s.truncated_normal(2.0, 1.0, 1.0, 3.0) / m;
    // sd of the truncated distribution is 0.5396; 4 standard errors.
    CHECK(std::abs(mean - 2.0) <= 4.0 * 0.5396 / std::sqrt(m));
  }

  SUBCASE("one-sided truncation matches the half-normal mean") {
    const int m = 100000;
    double mean = 0.0;
    for (int i = 0; i < m; ++i) mean += s.truncated_normal(0.0, 1.0, 0.0, 6.0) / m;
    const double expect = std::sqrt(2.0 / std::acos(-1.0));  // 0.79788
    CHECK(std::abs(mean - expect) <= 4.0 * 0.6028 / std::sqrt(m));
  }

  SUBCASE("closed-form mean helper agrees with draws") {
    const double mu = 0.3, sd = 0.5, lo = -0.1, hi = 0.3;
    const int m = 200000;
    double mean = 0.0;
    for (int i = 0; i < m; ++i) mean += s.truncated_normal(mu, sd, lo, hi) / m;
    CHECK(std::abs(mean - tn_mean(mu, sd, lo, hi)) <= 2e-3);
  }
}

TEST_CASE("poisson counts: mean and dispersion at large rate") {
  rng::Stream s(rng::derive_key(13u, 0x706fu));
  const double lambda = 150.0;
  const int m = 10000;
  double mean = 0.0, sq = 0.0;
  for (int i = 0; i < m; ++i) {
    const double k = static_cast<double>(s.poisson(lambda));
    mean += k / m;
    sq += k * k / m;
  }
  const double var = sq - mean * mean;
  CHECK(std::abs(mean / lambda - 1.0) <= 0.01);
  CHECK(var / mean >= 0.9);
  CHECK(var / mean <= 1.1);
}

TEST_CASE("arrival times follow the latent distribution") {
  // Kolmogorov-Smirnov at the 1% level across 100 independent datasets;
  // expect at least 95 passes.
  LqdSimConfig cfg = default_lqd_config();
  cfg.alpha = 400.0;
  int passes = 0;
  for (int k = 0; k < 100; ++k) {
    const SimulatedDataset d = simulate_lqd(1, cfg, 1000u + k);
    const auto& t = d.samples[0].arrivals;
    if (t.size() < 50) continue;  // does not happen at this rate
    const QuantileCurve& q = d.latent[0].quantile;
    const double stat =
        oracle::ks_statistic(t, [&](double v) { return q.inverse(v); });
    if (stat < oracle::ks_critical_001(t.size())) ++passes;
  }
  CHECK(passes >= 95);
}

TEST_CASE("tau curve helpers") {
  TauModel m;  // symmetric noise: the mean term drops out exactly
  CHECK(oracle_tau(0.3, m) == doctest::Approx(1.06).epsilon(1e-12));
  CHECK(expected_tau(m) == doctest::Approx(1.1).epsilon(1e-12));

  TauModel skew = m;
  skew.noise_lo = -0.1;
  skew.noise_hi = 0.3;
  skew.noise_sd = 0.5;
  const double shift = tn_mean(0.0, 0.5, -0.1, 0.3);
  CHECK(oracle_tau(0.3, skew) == doctest::Approx(1.06 + shift).epsilon(1e-12));
  CHECK(expected_tau(skew) == doctest::Approx(1.1 + shift).epsilon(1e-12));
}

TEST_CASE("mean-shape oracle: deterministic cases") {
  // With all latent noise off the oracle is the fixed curve for any rep count.
  TruncNormSimConfig cfg = default_truncnorm_config();
  cfg.mean_noise_sd = 0.0;
  cfg.sd_noise_sd = 0.0;
  const double x = 0.4;
  const QuantileCurve one = oracle_shape(x, cfg, 1, 7u);
  const QuantileCurve many = oracle_shape(x, cfg, 5, 7u);
  const auto grid = interior_grid(cfg.grid);
  for (int j = 0; j < cfg.grid; ++j) {
    const double expect = tn_quantile(grid[j], 0.3 + 0.4 * x, 0.1 - 0.01 * x, 1.0);
    CHECK(std::abs(one.values()[j] - expect) <= 1e-12);
    CHECK(std::abs(many.values()[j] - expect) <= 1e-12);
  }

  LqdSimConfig flat = flat_lqd_config();
  const QuantileCurve u = oracle_shape(0.7, flat, 3, 9u);
  for (int j = 0; j < flat.grid; ++j)
    CHECK(std::abs(u.values()[j] - interior_grid(flat.grid)[j]) <= 1e-12);

  CHECK_THROWS_AS(oracle_shape(0.5, cfg, 0, 1u), ConfigError);
}

TEST_CASE("mean-shape oracle: error shrinks like one over sqrt reps") {
  const LqdSimConfig cfg = default_lqd_config();
  const double x = 0.3;
  const int meta = 50, reps = 40;
  std::vector<double> small(meta), big(meta);
  for (int m = 0; m < meta; ++m) {
    small[m] = oracle_shape(x, cfg, reps, 5000u + m).values()[cfg.grid / 2];
    big[m] = oracle_shape(x, cfg, 2 * reps, 9000u + m).values()[cfg.grid / 2];
  }
  const auto sd = [&](const std::vector<double>& v) {
    double mean = 0.0;
    for (double t : v) mean += t / v.size();
    double acc = 0.0;
    for (double t : v) acc += (t - mean) * (t - mean);
    return std::sqrt(acc / (v.size() - 1));
  };
  const double ratio = sd(big) / sd(small);
  CHECK(ratio >= 0.5);
  CHECK(ratio <= 0.92);  // target 1/sqrt(2), wide band for 50 meta reps
}

TEST_CASE("weighted-shape oracle") {
  SUBCASE("at the covariate midpoint every weight is one") {
    // Zero-variance latent curve independent of x: the weighted average is
    // exactly that curve because s(X, 1/2) = 1 identically.
    LqdSimConfig flat = flat_lqd_config();
    flat.mean_fn = [](double s, double) { return 2.0 * s; };
    const WeightedShapeAverage w = oracle_shape_global(0.5, flat, 25, 3u);
    std::vector<double> tab(flat.grid);
    const auto grid = interior_grid(flat.grid);
    for (int j = 0; j < flat.grid; ++j) tab[j] = 2.0 * grid[j];
    const QuantileCurve expect = lqd_inverse(tab, 1.0);
    REQUIRE(w.values.size() == static_cast<std::size_t>(flat.grid));
    CHECK(w.window == 1.0);
    CHECK(w.monotone);
    for (int j = 0; j < flat.grid; ++j)
      CHECK(std::abs(w.values[j] - expect.values()[j]) <= 1e-12);
  }

  SUBCASE("deterministic in the seed") {
    const TruncNormSimConfig cfg = default_truncnorm_config();
    const WeightedShapeAverage a = oracle_shape_global(0.8, cfg, 40, 11u);
    const WeightedShapeAverage b = oracle_shape_global(0.8, cfg, 40, 11u);
    const WeightedShapeAverage c = oracle_shape_global(0.8, cfg, 40, 12u);
    CHECK(a.values == b.values);
    CHECK(a.values != c.values);
  }

  SUBCASE("rep count must be positive") {
    CHECK_THROWS_AS(oracle_shape_global(0.5, default_lqd_config(), 0, 1u),
                    ConfigError);
  }
}
