#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "coxreg/core.hpp"

namespace coxreg {

// One replicate: arrival times inside [0, window] plus its covariate row.
struct PointProcessSample {
  std::vector<double> arrivals;
  std::vector<double> x;
};

// Empirical quantile of the arrival times at the interior grid: the
// left-continuous inverse of the empirical CDF, so grid level r maps to the
// ceil(r * m)-th order statistic. A replicate with no arrivals falls back to
// the uniform distribution on [0, window]. Values are nudged into the open
// interval by window * 1e-12 when an arrival sits on the boundary.
QuantileCurve empirical_quantile(std::vector<double> arrivals, double window, int nu);

// Same, for arrivals already sorted ascending.
QuantileCurve empirical_quantile_sorted(std::span<const double> arrivals, double window,
                                        int nu);

// Fills values at the interior grid without constructing a curve (hot path
// for building the per-dataset quantile matrix).
void empirical_quantile_values(std::span<const double> sorted_arrivals, double window,
                               int nu, double* out);

inline std::int64_t count(const PointProcessSample& s) {
  return static_cast<std::int64_t>(s.arrivals.size());
}

}  // namespace coxreg
