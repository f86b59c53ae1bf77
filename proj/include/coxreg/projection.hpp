#pragma once

#include <vector>

#include "coxreg/core.hpp"

// Projection of an averaged (possibly non-monotone) grid vector onto the set
// of admissible quantile vectors: with dr = 1/(nu+1) and slack bounds
// a = M dr, b = L dr, the feasible set is
//   a <= q_1 <= b,  a <= q_{j+1} - q_j <= b,  a <= T - q_nu <= b.
// Equivalently, all nu+1 increments of the padded sequence (0, q, T) live in
// [a, b]; summed they equal T, so the set is nonempty iff M <= T <= L.
//
// The solver is a primal active-set method on the chain of increment
// constraints. Tying an increment welds adjacent coordinates into a block
// whose equality-constrained optimum is a shifted block mean (or is pinned
// outright when the block touches an endpoint), so each iteration costs
// O(nu). ADMM over the same splitting (tridiagonal q-step, clipped
// increment step) is kept as a fallback and its result is polished through
// the same block solve. KKT residuals are verified before returning.

namespace coxreg {

struct QuantileConstraints {
  double window = 1.0;       // T
  double lower_slack = 1e-10;  // M
  double upper_slack = 1e10;   // L
};

struct ProjectionResult {
  std::vector<double> q;
  int iterations = 0;
  double primal_residual = 0.0;  // max constraint violation of q
  double duality_gap = 0.0;      // primal objective minus dual bound
  bool used_fallback = false;
};

// Euclidean projection of w (length nu) onto the admissible set. Throws
// ConfigError when the band is infeasible (T outside [M, L]) and
// NumericError when neither solver path reaches tolerance (primal 1e-9,
// gap 1e-10 relative, 1e5 iteration cap).
ProjectionResult project_quantile(const std::vector<double>& w,
                                  const QuantileConstraints& c);

// Wraps projected grid values as the piecewise-linear quantile interpolant
// through (0, 0) and (1, T).
QuantileCurve interpolate_solution(std::vector<double> q, double window);

}  // namespace coxreg
