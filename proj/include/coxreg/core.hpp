#pragma once

#include <vector>

#include "coxreg/kernels.hpp"

// Representations of points in the intensity space: an intensity factor
// (a nonnegative scalar, Euclidean metric) paired with a shape carried as a
// quantile function on a fixed interior grid (L2 metric between quantile
// functions, i.e. 2-Wasserstein between the underlying distributions).

namespace coxreg {

// Interior grid r_j = j/(nu+1), j = 1..nu, over the unit interval.
std::vector<double> interior_grid(int nu);

// Quantile function of a distribution on [0, T], stored as values at the
// interior grid and read back as the piecewise-linear interpolant through
// (0, 0), (r_j, q_j), (1, T). Values must sit strictly inside (0, T) and be
// nondecreasing; construction tolerates rounding-level wobble (1e-9 * T)
// and then pins the stored values to exact monotonicity.
class QuantileCurve {
 public:
  QuantileCurve(double window, std::vector<double> values);

  double window() const { return window_; }
  int grid_size() const { return static_cast<int>(values_.size()); }
  const std::vector<double>& values() const { return values_; }

  // Interpolant at t in [0, 1].
  double operator()(double t) const;

  // Generalized-inverse CDF evaluated at s in [0, T]:
  // F(s) = sup { t : Q(t) <= s }.
  double inverse(double s) const;

 private:
  double window_;
  std::vector<double> values_;
};

// Probability density on [0, T] tabulated on an equispaced grid including
// both endpoints; nonnegative and trapezoid-integrating to one within 1e-6.
class DensityCurve {
 public:
  DensityCurve(double window, std::vector<double> values);

  double window() const { return window_; }
  int grid_size() const { return static_cast<int>(values_.size()); }
  const std::vector<double>& values() const { return values_; }
  double grid_step() const { return window_ / (values_.size() - 1); }
  double integral() const;

 private:
  double window_;
  std::vector<double> values_;
};

// CDF values on an equispaced grid over [0, T] including endpoints.
struct CdfCurve {
  double window;
  std::vector<double> values;
};

struct IntensitySpacePoint {
  double tau;  // >= 0
  QuantileCurve shape;
};

// L2 distance between the two quantile interpolants, computed exactly on the
// common refinement of their knot sets (both are piecewise linear there).
// Equals the 2-Wasserstein distance between the represented distributions.
double wasserstein_distance(const QuantileCurve& a, const QuantileCurve& b);

// Product metric: sqrt of (tau difference)^2 + (shape distance)^2.
double intensity_distance(const IntensitySpacePoint& a, const IntensitySpacePoint& b);

// CDF of the distribution represented by Q, tabulated at m equispaced points
// of [0, T]. Flat stretches of Q become jumps of F; F(0) = 0, F(T) = 1.
CdfCurve quantile_to_cdf(const QuantileCurve& q, int m);

// Density recovery: local-linear slope estimate of F at m_out equispaced
// points with bandwidth b (0 < b < T/2), clipped at zero and renormalized to
// integrate to one. A flat F (no mass movement) is reported as an error.
DensityCurve cdf_to_density(const CdfCurve& f, double bandwidth, int m_out,
                            kern::KernelFamily kernel = kern::KernelFamily::epanechnikov);

}  // namespace coxreg
