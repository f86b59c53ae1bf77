#include "coxreg/projection.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "coxreg/errors.hpp"

namespace coxreg {

namespace {

constexpr int kMaxIterations = 100000;

// Working-set state: one entry per increment of the padded sequence
// (0, q_1..q_nu, T); increment j is d_j = q_{j+1} - q_j with q_0 = 0 and
// q_{nu+1} = T. 0 = free, -1 = pinned at the lower bound, +1 = at the upper.
using Active = std::vector<std::int8_t>;

struct Band {
  double a, b, T;
  int nu;
};

inline double bound_of(const Band& bd, std::int8_t s) { return s > 0 ? bd.b : bd.a; }

inline double incr(const Band& bd, const std::vector<double>& q, int j) {
  if (j == 0) return q[0];
  if (j == bd.nu) return bd.T - q[bd.nu - 1];
  return q[j] - q[j - 1];
}

// Equality-constrained optimum for the current working set. Active internal
// increments weld consecutive coordinates into blocks with fixed offsets;
// a block's free level is its offset-corrected mean of w unless an endpoint
// pin determines it outright.
void solve_working_set(const std::vector<double>& w, const Band& bd, const Active& act,
                       std::vector<double>& t) {
  const int nu = bd.nu;
  int p = 0;
  while (p < nu) {
    int r = p;
    while (r + 1 < nu && act[r + 1] != 0) ++r;
    // Offsets within the block: o_p = 0, o_{i+1} = o_i + pinned increment.
    double z;
    const bool left = (p == 0 && act[0] != 0);
    bool right = (r == nu - 1 && act[nu] != 0);
    if (left) {
      z = bound_of(bd, act[0]);
    } else if (right) {
      double o = 0.0;
      for (int i = p + 1; i <= r; ++i) o += bound_of(bd, act[i]);
      z = bd.T - bound_of(bd, act[nu]) - o;
    } else {
      double acc = w[p], off = 0.0;
      for (int i = p + 1; i <= r; ++i) {
        off += bound_of(bd, act[i]);
        acc += w[i] - off;
      }
      z = acc / (r - p + 1);
    }
    t[p] = z;
    for (int i = p + 1; i <= r; ++i) t[i] = t[i - 1] + bound_of(bd, act[i]);
    p = r + 1;
  }
}

// Signed multipliers for the working set via the stationarity recursion
// mu_{i+1} = mu_i + (q_i - w_i); the free constant per block is fixed by
// whichever block ends are unpinned. Returns through `mu` (zero at free
// increments). For the fully pinned chain the one-parameter family is
// resolved to the most sign-feasible member.
void compute_multipliers(const std::vector<double>& w, const Band& bd, const Active& act,
                         const std::vector<double>& q, std::vector<double>& mu) {
  const int nu = bd.nu;
  std::fill(mu.begin(), mu.end(), 0.0);
  int p = 0;
  while (p < nu) {
    int r = p;
    while (r + 1 < nu && act[r + 1] != 0) ++r;
    const bool left = (p == 0 && act[0] != 0);
    const bool right = (r == nu - 1 && act[nu] != 0);
    if (left && right) {
      // chain fully pinned: mu_j(c) = base_j + c
      std::vector<double> base(r - p + 3);
      base[0] = 0.0;
      for (int i = p; i <= r; ++i) base[i - p + 1] = base[i - p] + (q[i] - w[i]);
      double clo = -1e300, chi = 1e300;
      auto fold = [&](int j, double bj) {
        if (act[j] > 0) clo = std::max(clo, -bj);   // need base + c >= 0
        else if (act[j] != 0) chi = std::min(chi, -bj);  // need base + c <= 0
      };
      fold(0, base[0]);
      for (int i = p + 1; i <= r; ++i)
        if (act[i] != 0) fold(i, base[i - p]);
      fold(nu, base[r - p + 1]);
      // Prefer the least-norm feasible member; an inverted interval means a
      // constraint must be dropped, and the midpoint exposes the worst one.
      const double c = clo <= chi ? std::clamp(0.0, clo, chi) : 0.5 * (clo + chi);
      mu[0] = base[0] + c;
      for (int i = p + 1; i <= r; ++i) mu[i] = base[i - p] + c;
      mu[nu] = base[r - p + 1] + c;
    } else if (left) {
      // mu at the block's right end must vanish
      double s = 0.0;
      for (int i = p; i <= r; ++i) s += q[i] - w[i];
      mu[0] = -s;
      double cur = mu[0];
      for (int i = p + 1; i <= r; ++i) {
        cur += q[i - 1] - w[i - 1];
        mu[i] = act[i] != 0 ? cur : 0.0;
      }
    } else {
      double cur = 0.0;  // mu_p = 0 at an unpinned block start
      for (int i = p; i <= r; ++i) {
        cur += q[i] - w[i];
        if (i + 1 <= r) mu[i + 1] = cur;
      }
      if (right) mu[nu] = cur;
    }
    p = r + 1;
  }
}

struct AsOutcome {
  bool converged = false;
  int iterations = 0;
};

AsOutcome active_set_loop(const std::vector<double>& w, const Band& bd, Active& act,
                          std::vector<double>& q, std::vector<double>& mu,
                          int iteration_budget) {
  const int nu = bd.nu;
  double scale = bd.T;
  for (double v : w) scale = std::max(scale, std::fabs(v));
  const double mu_tol = 1e-10 * scale;

  std::vector<double> t(nu);
  AsOutcome out;
  while (out.iterations < iteration_budget) {
    ++out.iterations;
    solve_working_set(w, bd, act, t);

    // Longest feasible step toward the working-set optimum.
    double alpha = 1.0;
    int block_j = -1;
    std::int8_t block_side = 0;
    for (int j = 0; j <= nu; ++j) {
      if (act[j] != 0) continue;
      const double dc = incr(bd, q, j);
      const double dt = incr(bd, t, j);
      const double delta = dt - dc;
      if (delta > 0.0 && dt > bd.b) {
        const double aj = (bd.b - dc) / delta;
        if (aj < alpha) {
          alpha = aj;
          block_j = j;
          block_side = 1;
        }
      } else if (delta < 0.0 && dt < bd.a) {
        const double aj = (bd.a - dc) / delta;
        if (aj < alpha) {
          alpha = aj;
          block_j = j;
          block_side = -1;
        }
      }
    }
    if (alpha < 0.0) alpha = 0.0;

    if (block_j >= 0) {
      for (int i = 0; i < nu; ++i) q[i] += alpha * (t[i] - q[i]);
      act[block_j] = block_side;
      continue;
    }

    q = t;
    compute_multipliers(w, bd, act, q, mu);
    int drop = -1;
    double worst = mu_tol;
    for (int j = 0; j <= nu; ++j) {
      if (act[j] == 0) continue;
      const double viol = act[j] > 0 ? -mu[j] : mu[j];
      if (viol > worst) {
        worst = viol;
        drop = j;
      }
    }
    if (drop < 0) {
      out.converged = true;
      return out;
    }
    act[drop] = 0;
  }
  return out;
}

// Splitting-method fallback: alternate a tridiagonal proximal step for q with
// clipping of the padded increments, then hand the detected bound pattern
// back to the exact block solver.
struct AdmmOutcome {
  Active pattern;
  int iterations = 0;
};

AdmmOutcome admm_pattern(const std::vector<double>& w, const Band& bd,
                         int iteration_budget) {
  const int nu = bd.nu;
  const int m = nu + 1;
  const double rho = 4.0;
  double scale = bd.T;
  for (double v : w) scale = std::max(scale, std::fabs(v));
  const double tol = 1e-13 * scale;

  std::vector<double> q(nu), z(m), u(m, 0.0), d(m), rhs(nu), dp(nu);
  for (int i = 0; i < nu; ++i) q[i] = bd.T * (i + 1) / (nu + 1);
  for (int j = 0; j < m; ++j) z[j] = incr(bd, q, j);

  // Thomas factorization of I + rho * tridiag(-1, 2, -1), constant per run.
  std::vector<double> den(nu);
  {
    const double dm = 1.0 + 2.0 * rho;
    den[0] = dm;
    for (int i = 1; i < nu; ++i) den[i] = dm - rho * rho / den[i - 1];
  }

  AdmmOutcome out;
  out.pattern.assign(m, 0);
  for (; out.iterations < iteration_budget; ++out.iterations) {
    // q-step: (I + rho D'D) q = w + rho D'(z - u - t0), with t0 the constant
    // part of the padded increment map (T in the last slot).
    for (int i = 0; i < nu; ++i) {
      const double vi = z[i] - u[i];
      const double vip = z[i + 1] - u[i + 1] - (i + 1 == nu ? bd.T : 0.0);
      rhs[i] = w[i] + rho * (vi - vip);
    }
    dp[0] = rhs[0] / den[0];
    for (int i = 1; i < nu; ++i) dp[i] = (rhs[i] + rho * dp[i - 1]) / den[i];
    q[nu - 1] = dp[nu - 1];
    for (int i = nu - 2; i >= 0; --i) q[i] = dp[i] + rho / den[i] * q[i + 1];

    double pr = 0.0, dr = 0.0;
    for (int j = 0; j < m; ++j) {
      d[j] = incr(bd, q, j);
      const double zn = std::clamp(d[j] + u[j], bd.a, bd.b);
      dr = std::max(dr, std::fabs(zn - z[j]) * rho);
      z[j] = zn;
      u[j] += d[j] - z[j];
      pr = std::max(pr, std::fabs(d[j] - z[j]));
    }
    if (pr < tol && dr < tol) break;
  }
  for (int j = 0; j < m; ++j) {
    if (z[j] <= bd.a) out.pattern[j] = -1;
    else if (z[j] >= bd.b) out.pattern[j] = 1;
  }
  return out;
}

}  // namespace

ProjectionResult project_quantile(const std::vector<double>& w,
                                  const QuantileConstraints& c) {
  const int nu = static_cast<int>(w.size());
  if (nu < 1) throw ConfigError("project_quantile: empty target");
  if (!(c.window > 0.0)) throw ConfigError("project_quantile: window must be positive");
  if (!(c.lower_slack > 0.0) || !(c.upper_slack > c.lower_slack))
    throw ConfigError("project_quantile: slack band must satisfy 0 < M < L");
  if (c.window < c.lower_slack || c.window > c.upper_slack)
    throw ConfigError("project_quantile: infeasible band, window outside [M, L]");
  for (double v : w)
    if (!std::isfinite(v)) throw DataError("project_quantile: non-finite target value");

  const double dr = 1.0 / (nu + 1);
  const Band bd{c.lower_slack * dr, c.upper_slack * dr, c.window, nu};

  ProjectionResult res;
  Active act(nu + 1, 0);
  std::vector<double> q(nu), mu(nu + 1, 0.0);
  for (int i = 0; i < nu; ++i) q[i] = bd.T * (i + 1) / (nu + 1);

  AsOutcome as = active_set_loop(w, bd, act, q, mu, kMaxIterations);
  res.iterations = as.iterations;
  if (!as.converged) {
    res.used_fallback = true;
    AdmmOutcome warm = admm_pattern(w, bd, kMaxIterations);
    res.iterations += warm.iterations;
    act = warm.pattern;
    for (int i = 0; i < nu; ++i) q[i] = bd.T * (i + 1) / (nu + 1);
    as = active_set_loop(w, bd, act, q, mu, kMaxIterations);
    res.iterations += as.iterations;
    if (!as.converged)
      throw NumericError("project_quantile: iteration cap reached without KKT point");
  }

  // Certify the point before handing it back.
  double scale = bd.T;
  for (double v : w) scale = std::max(scale, std::fabs(v));
  double pres = 0.0;
  for (int j = 0; j <= nu; ++j) {
    const double dj = incr(bd, q, j);
    pres = std::max(pres, std::max(bd.a - dj, dj - bd.b));
  }
  pres = std::max(pres, 0.0);

  double primal = 0.0;
  for (int i = 0; i < nu; ++i) primal += (q[i] - w[i]) * (q[i] - w[i]);
  primal *= 0.5;

  std::vector<double> qd(nu);
  for (int i = 0; i < nu; ++i) qd[i] = w[i] - (mu[i] - mu[i + 1]);
  double dual = 0.0;
  for (int i = 0; i < nu; ++i) dual += (qd[i] - w[i]) * (qd[i] - w[i]);
  dual *= 0.5;
  for (int j = 0; j <= nu; ++j) {
    const double dj = incr(bd, qd, j);
    if (mu[j] > 0.0) dual += mu[j] * (dj - bd.b);
    else if (mu[j] < 0.0) dual += (-mu[j]) * (bd.a - dj);
  }

  res.primal_residual = pres;
  res.duality_gap = primal - dual;
  res.q = std::move(q);
  if (res.primal_residual > 1e-9 * std::max(1.0, scale) ||
      res.duality_gap > 1e-10 * std::max(1.0, primal))
    throw NumericError("project_quantile: solution failed certification (residual " +
                       std::to_string(res.primal_residual) + ", gap " +
                       std::to_string(res.duality_gap) + ")");
  return res;
}

QuantileCurve interpolate_solution(std::vector<double> q, double window) {
  return QuantileCurve(window, std::move(q));
}

}  // namespace coxreg
