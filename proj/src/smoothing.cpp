#include "coxreg/smoothing.hpp"

#include <Eigen/Dense>
#include <cmath>

#include "coxreg/errors.hpp"

namespace coxreg {

WeightVector local_weights(std::span<const double> xs, double x, double h,
                           kern::KernelFamily kernel) {
  const std::size_t n = xs.size();
  if (n == 0) throw ConfigError("local_weights: empty design");
  if (!(h > 0.0)) throw ConfigError("local_weights: bandwidth must be positive");

  // K_h normalization cancels in the weight ratio, so the raw kernel values
  // are enough.
  std::vector<double> k(n), kd(n);
  kern::kernel_weights(kernel, xs.data(), n, x, h, k.data());
  int inside = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (k[i] > 0.0) ++inside;
    kd[i] = k[i] * (xs[i] - x);
  }
  const double inv_n = 1.0 / static_cast<double>(n);
  const double u0 = kern::sum(k.data(), n) * inv_n;
  const double u1 = kern::sum(kd.data(), n) * inv_n;
  double u2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) u2 += kd[i] * (xs[i] - x);
  u2 *= inv_n;

  const double sigma0 = u0 * u2 - u1 * u1;
  if (!(sigma0 > 1e-14 * u0 * u2) || u0 == 0.0)
    throw NumericError("local_weights: degenerate design in window around x=" +
                       std::to_string(x));

  WeightVector out;
  out.w.resize(n);
  out.window_count = inside;
  const double inv_s = 1.0 / sigma0;
  for (std::size_t i = 0; i < n; ++i)
    out.w[i] = k[i] * (u2 - u1 * (xs[i] - x)) * inv_s;
  return out;
}

WeightVector global_weights(std::span<const double> X, int n, int p,
                            std::span<const double> x) {
  if (n < 2 || p < 1) throw ConfigError("global_weights: need n >= 2, p >= 1");
  if (static_cast<int>(X.size()) != n * p)
    throw ConfigError("global_weights: X size does not match n*p");
  if (static_cast<int>(x.size()) != p)
    throw ConfigError("global_weights: query point has wrong dimension");

  Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>
      Xm(X.data(), n, p);
  const Eigen::VectorXd mean = Xm.colwise().mean();
  const Eigen::MatrixXd centered = Xm.rowwise() - mean.transpose();
  const Eigen::MatrixXd cov = centered.transpose() * centered / static_cast<double>(n);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov);
  const double lo = es.eigenvalues().minCoeff();
  const double hi = es.eigenvalues().maxCoeff();
  if (!(lo > 0.0) || hi / lo >= 1e12)
    throw NumericError("global_weights: covariate covariance is singular or "
                       "ill-conditioned (cond >= 1e12)");

  Eigen::VectorXd q(p);
  for (int j = 0; j < p; ++j) q[j] = x[j] - mean[j];
  const Eigen::VectorXd z = es.eigenvectors() *
                            (es.eigenvectors().transpose() * q).cwiseQuotient(
                                es.eigenvalues());

  WeightVector out;
  out.w.resize(n);
  out.window_count = n;
  for (int i = 0; i < n; ++i) out.w[i] = 1.0 + centered.row(i).dot(z);
  return out;
}

double local_linear_fit(std::span<const double> xs, std::span<const double> ys, double x,
                        double h, kern::KernelFamily kernel) {
  if (xs.size() != ys.size()) throw ConfigError("local_linear_fit: length mismatch");
  const WeightVector wv = local_weights(xs, x, h, kernel);
  return kern::dot(wv.w.data(), ys.data(), ys.size()) / static_cast<double>(ys.size());
}

}  // namespace coxreg
