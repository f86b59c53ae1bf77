#include "coxreg/empirical.hpp"

#include <algorithm>
#include <cmath>

#include "coxreg/errors.hpp"

namespace coxreg {

void empirical_quantile_values(std::span<const double> sorted, double window, int nu,
                               double* out) {
  const double eps = window * 1e-12;
  const std::size_t m = sorted.size();
  if (m == 0) {
    // No arrivals observed: uniform shape.
    const double step = window / (nu + 1);
    for (int j = 0; j < nu; ++j) out[j] = (j + 1) * step;
    return;
  }
  for (int j = 0; j < nu; ++j) {
    const double r = static_cast<double>(j + 1) / (nu + 1);
    // Left-continuous inverse: inf{ s : F(s) >= r } is the k-th order
    // statistic with k = ceil(r m).
    std::size_t k = static_cast<std::size_t>(std::ceil(r * m));
    if (k < 1) k = 1;
    if (k > m) k = m;
    double v = sorted[k - 1];
    if (v < eps) v = eps;
    if (v > window - eps) v = window - eps;
    out[j] = v;
  }
}

QuantileCurve empirical_quantile_sorted(std::span<const double> arrivals, double window,
                                        int nu) {
  if (!(window > 0.0)) throw ConfigError("empirical_quantile: window must be positive");
  if (nu < 1) throw ConfigError("empirical_quantile: nu must be >= 1");
  for (double t : arrivals)
    if (!(t >= 0.0) || !(t <= window))
      throw DataError("empirical_quantile: arrival outside [0, window]");
  std::vector<double> q(nu);
  empirical_quantile_values(arrivals, window, nu, q.data());
  return QuantileCurve(window, std::move(q));
}

QuantileCurve empirical_quantile(std::vector<double> arrivals, double window, int nu) {
  std::sort(arrivals.begin(), arrivals.end());
  return empirical_quantile_sorted(arrivals, window, nu);
}

}  // namespace coxreg
