#pragma once

// Independent reference implementations used only by the test suite. These
// deliberately avoid sharing code with the library: dense linear algebra is
// hand-rolled Gaussian elimination, quadrature is brute-force sampling, and
// the projection references are pool-adjacent-violators and exhaustive
// working-set enumeration.

#include <cstdint>
#include <functional>
#include <vector>

namespace oracle {

// Unweighted isotonic regression (nondecreasing fit minimizing squared loss).
std::vector<double> pava(const std::vector<double>& w);

// Solves A x = b by Gaussian elimination with partial pivoting; returns false
// on a (near-)singular system. A is row-major n x n and is destroyed.
bool gauss_solve(std::vector<double>& A, std::vector<double>& b, int n);

// Exhaustive-enumeration solution of
//   min ||q - w||^2  s.t.  all padded increments of (0, q, T) in [M dr, L dr]
// for small nu: tries every lower/free/upper assignment of the nu+1
// increments, solves the equality-constrained subproblem through a dense KKT
// system, and keeps the feasible candidate with the smallest objective.
std::vector<double> qp_enumerate(const std::vector<double>& w, double T, double M,
                                 double L);

// Brute-force L2 distance between two quantile interpolants by midpoint
// quadrature with `pts` panels.
double quantile_l2_bruteforce(const std::function<double(double)>& qa,
                              const std::function<double(double)>& qb, int pts);

// Two-sided Kolmogorov-Smirnov statistic of a sorted sample against cdf.
double ks_statistic(const std::vector<double>& sorted_sample,
                    const std::function<double(double)>& cdf);

// Approximate 1% critical value of the KS statistic at sample size m.
double ks_critical_001(std::size_t m);

// Ordinary least squares y ~ a + b x; returns {a, b}.
std::pair<double, double> ols_fit(const std::vector<double>& x,
                                  const std::vector<double>& y);

}  // namespace oracle
