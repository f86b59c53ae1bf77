#include <cmath>
#include <random>
#include <vector>

#include "coxreg/errors.hpp"
#include "coxreg/smoothing.hpp"
#include "doctest.h"
#include "oracle_helpers.hpp"

using namespace coxreg;

TEST_CASE("global weights: worked example") {
  // X = (0,1,2,3), query x = 3: biased variance 1.25, mean 1.5,
  // s_i = 1 + (X_i-1.5)(3-1.5)/1.25 -> (-0.8, 0.4, 1.6, 2.8)
  const std::vector<double> X = {0.0, 1.0, 2.0, 3.0};
  const std::vector<double> x = {3.0};
  const auto wv = global_weights(X, 4, 1, x);
  REQUIRE(wv.w.size() == 4);
  CHECK(wv.w[0] == doctest::Approx(-0.8).epsilon(1e-12));
  CHECK(wv.w[1] == doctest::Approx(0.4).epsilon(1e-12));
  CHECK(wv.w[2] == doctest::Approx(1.6).epsilon(1e-12));
  CHECK(wv.w[3] == doctest::Approx(2.8).epsilon(1e-12));
}

TEST_CASE("global weights: algebraic identities, p = 1 and p = 3") {
  std::mt19937_64 g(11);
  std::uniform_real_distribution<double> u(-1.0, 2.0);
  for (int p : {1, 3}) {
    const int n = 60;
    std::vector<double> X(n * p), x(p);
    for (auto& v : X) v = u(g);
    for (auto& v : x) v = u(g);
    const auto wv = global_weights(X, n, p, x);

    double mean = 0.0;
    for (double w : wv.w) mean += w;
    mean /= n;
    CHECK(std::fabs(mean - 1.0) <= 1e-10);

    // n^-1 sum s_i (X_i - Xbar) recovers (x - Xbar)
    std::vector<double> xbar(p, 0.0);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < p; ++j) xbar[j] += X[i * p + j] / n;
    for (int j = 0; j < p; ++j) {
      double acc = 0.0;
      for (int i = 0; i < n; ++i) acc += wv.w[i] * (X[i * p + j] - xbar[j]);
      acc /= n;
      CHECK(acc == doctest::Approx(x[j] - xbar[j]).epsilon(1e-9));
    }
  }
}

TEST_CASE("global weights: cross-check against hand-rolled solve") {
  std::mt19937_64 g(12);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const int n = 50, p = 3;
  std::vector<double> X(n * p), x(p);
  for (auto& v : X) v = u(g);
  for (auto& v : x) v = u(g);
  const auto wv = global_weights(X, n, p, x);

  // independent route: build covariance, solve by Gaussian elimination
  std::vector<double> xbar(p, 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < p; ++j) xbar[j] += X[i * p + j] / n;
  std::vector<double> cov(p * p, 0.0);
  for (int i = 0; i < n; ++i)
    for (int a = 0; a < p; ++a)
      for (int b = 0; b < p; ++b)
        cov[a * p + b] += (X[i * p + a] - xbar[a]) * (X[i * p + b] - xbar[b]) / n;
  std::vector<double> rhs(p);
  for (int j = 0; j < p; ++j) rhs[j] = x[j] - xbar[j];
  REQUIRE(oracle::gauss_solve(cov, rhs, p));
  for (int i = 0; i < n; ++i) {
    double s = 1.0;
    for (int j = 0; j < p; ++j) s += (X[i * p + j] - xbar[j]) * rhs[j];
    CHECK(wv.w[i] == doctest::Approx(s).epsilon(1e-10));
  }
}

TEST_CASE("global weights: affine reparametrization invariance") {
  std::mt19937_64 g(13);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const int n = 40, p = 2;
  std::vector<double> X(n * p), x(p);
  for (auto& v : X) v = u(g);
  for (auto& v : x) v = u(g);
  const auto base = global_weights(X, n, p, x);

  // X -> X A + c with invertible A
  const double A[4] = {1.3, -0.4, 0.7, 2.1};
  const double c[2] = {5.0, -2.0};
  std::vector<double> Xt(n * p), xt(p);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < p; ++j)
      Xt[i * p + j] = X[i * p] * A[0 + j] + X[i * p + 1] * A[2 + j] + c[j];
  for (int j = 0; j < p; ++j) xt[j] = x[0] * A[0 + j] + x[1] * A[2 + j] + c[j];
  const auto trans = global_weights(Xt, n, p, xt);
  for (int i = 0; i < n; ++i)
    CHECK(trans.w[i] == doctest::Approx(base.w[i]).epsilon(1e-9));
}

TEST_CASE("global weights: singular covariance is rejected") {
  // second column is a copy of the first
  const int n = 20, p = 2;
  std::vector<double> X(n * p), x = {0.5, 0.5};
  std::mt19937_64 g(14);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < n; ++i) {
    X[i * p] = u(g);
    X[i * p + 1] = X[i * p];
  }
  CHECK_THROWS_AS(global_weights(X, n, p, x), NumericError);
}

TEST_CASE("local weights: mean-one and orthogonality identities") {
  std::mt19937_64 g(15);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int rep = 0; rep < 200; ++rep) {
    const int n = 20 + static_cast<int>(u(g) * 180);
    std::vector<double> xs(n);
    for (auto& v : xs) v = u(g);
    const double x = 0.2 + 0.6 * u(g);
    const double h = 0.15 + 0.3 * u(g);
    const auto fam = static_cast<kern::KernelFamily>(rep % 3);
    const auto wv = local_weights(xs, x, h, fam);

    double mean = 0.0, orth = 0.0;
    for (int i = 0; i < n; ++i) {
      mean += wv.w[i];
      orth += wv.w[i] * (xs[i] - x);
    }
    mean /= n;
    orth /= n;
    CHECK(std::fabs(mean - 1.0) <= 1e-10);
    CHECK(std::fabs(orth) <= 1e-10);
  }
}

TEST_CASE("local weights: reproduce the weighted least squares line") {
  // n^-1 sum s_i y_i must equal the local-linear WLS fit evaluated at x
  std::mt19937_64 g(16);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const int n = 80;
  std::vector<double> xs(n), ys(n);
  for (int i = 0; i < n; ++i) {
    xs[i] = u(g);
    ys[i] = std::sin(3.0 * xs[i]) + 0.1 * u(g);
  }
  const double x = 0.45, h = 0.25;
  const double fit = local_linear_fit(xs, ys, x, h, kern::KernelFamily::epanechnikov);

  // independent WLS: minimize sum K_i (y_i - a - b (x_i - x))^2, fit = a
  double s0 = 0, s1 = 0, s2 = 0, t0 = 0, t1 = 0;
  for (int i = 0; i < n; ++i) {
    const double d = xs[i] - x;
    const double uu = d / h;
    const double k = std::fabs(uu) < 1.0 ? 0.75 * (1 - uu * uu) : 0.0;
    s0 += k;
    s1 += k * d;
    s2 += k * d * d;
    t0 += k * ys[i];
    t1 += k * d * ys[i];
  }
  const double a = (s2 * t0 - s1 * t1) / (s0 * s2 - s1 * s1);
  CHECK(fit == doctest::Approx(a).epsilon(1e-11));
}

TEST_CASE("local weights: exact on affine data") {
  std::vector<double> xs = {0.1, 0.3, 0.4, 0.55, 0.7, 0.9};
  std::vector<double> ys(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) ys[i] = 2.0 - 3.0 * xs[i];
  const double fit = local_linear_fit(xs, ys, 0.5, 0.35, kern::KernelFamily::quartic);
  CHECK(fit == doctest::Approx(2.0 - 1.5).epsilon(1e-12));
}

TEST_CASE("local weights: degenerate designs are rejected") {
  // all mass on one covariate value
  std::vector<double> xs(10, 0.5);
  CHECK_THROWS_AS(local_weights(xs, 0.5, 0.1, kern::KernelFamily::epanechnikov),
                  NumericError);
  // empty window
  std::vector<double> spread = {0.1, 0.2, 0.9};
  CHECK_THROWS_AS(local_weights(spread, 0.55, 0.05, kern::KernelFamily::epanechnikov),
                  NumericError);
  CHECK_THROWS_AS(local_weights(spread, 0.5, -1.0, kern::KernelFamily::epanechnikov),
                  ConfigError);
}

TEST_CASE("local weights: window count reports kernel support") {
  std::vector<double> xs = {0.1, 0.45, 0.5, 0.55, 0.95};
  const auto wv = local_weights(xs, 0.5, 0.1, kern::KernelFamily::epanechnikov);
  CHECK(wv.window_count == 3);
}
