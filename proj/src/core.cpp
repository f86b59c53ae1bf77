#include "coxreg/core.hpp"

#include <algorithm>
#include <cmath>

#include "coxreg/errors.hpp"

namespace coxreg {

std::vector<double> interior_grid(int nu) {
  if (nu < 1) throw ConfigError("interior_grid: nu must be >= 1");
  std::vector<double> r(nu);
  const double step = 1.0 / (nu + 1);
  for (int j = 0; j < nu; ++j) r[j] = (j + 1) * step;
  return r;
}

QuantileCurve::QuantileCurve(double window, std::vector<double> values)
    : window_(window), values_(std::move(values)) {
  if (!(window_ > 0.0)) throw ConfigError("QuantileCurve: window must be positive");
  if (values_.empty()) throw ConfigError("QuantileCurve: empty grid");
  const double slack = 1e-9 * window_;
  double prev = 0.0;
  for (double v : values_) {
    if (!(v > 0.0) || !(v < window_))
      throw NumericError("QuantileCurve: value outside (0, window)");
    if (v < prev - slack)
      throw NumericError("QuantileCurve: values decrease beyond tolerance");
    prev = v;
  }
  // Pin exact monotonicity so downstream inversion never sees a dip.
  for (std::size_t j = 1; j < values_.size(); ++j)
    if (values_[j] < values_[j - 1]) values_[j] = values_[j - 1];
}

double QuantileCurve::operator()(double t) const {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return window_;
  const int nu = grid_size();
  const double pos = t * (nu + 1);
  int k = static_cast<int>(pos);  // knot index below t; knots at j/(nu+1)
  if (k > nu) k = nu;
  const double y0 = k == 0 ? 0.0 : values_[k - 1];
  const double y1 = k == nu ? window_ : values_[k];
  return y0 + (pos - k) * (y1 - y0);
}

double QuantileCurve::inverse(double s) const {
  if (s <= 0.0) return 0.0;
  if (s >= window_) return 1.0;
  const int nu = grid_size();
  // Number of interior knot values <= s; ties resolve to the last knot of the
  // flat stretch, which realizes the sup in F(s) = sup{t : Q(t) <= s}.
  const int c = static_cast<int>(
      std::upper_bound(values_.begin(), values_.end(), s) - values_.begin());
  const double step = 1.0 / (nu + 1);
  const double y0 = c == 0 ? 0.0 : values_[c - 1];
  const double y1 = c == nu ? window_ : values_[c];
  const double t0 = c * step;
  if (y1 <= y0) return t0;
  return t0 + (s - y0) / (y1 - y0) * step;
}

DensityCurve::DensityCurve(double window, std::vector<double> values)
    : window_(window), values_(std::move(values)) {
  if (!(window_ > 0.0)) throw ConfigError("DensityCurve: window must be positive");
  if (values_.size() < 2) throw ConfigError("DensityCurve: need at least 2 grid points");
  for (double v : values_)
    if (!(v >= 0.0)) throw NumericError("DensityCurve: negative value");
  const double total = integral();
  if (std::fabs(total - 1.0) > 1e-6)
    throw NumericError("DensityCurve: trapezoid integral " + std::to_string(total) +
                       " is not 1 within 1e-6");
}

double DensityCurve::integral() const {
  const double h = grid_step();
  double acc = 0.5 * (values_.front() + values_.back());
  for (std::size_t i = 1; i + 1 < values_.size(); ++i) acc += values_[i];
  return acc * h;
}

namespace {

// Integral of the squared difference of two piecewise-linear curves sharing
// knot set {t_k}: the difference is linear per segment, so each segment
// contributes h/3 (e0^2 + e0 e1 + e1^2) exactly.
double sq_l2_from_knot_errors(const std::vector<double>& e, const std::vector<double>& t) {
  double acc = 0.0;
  for (std::size_t k = 0; k + 1 < e.size(); ++k) {
    const double h = t[k + 1] - t[k];
    if (h <= 0.0) continue;
    acc += h * (e[k] * e[k] + e[k] * e[k + 1] + e[k + 1] * e[k + 1]) / 3.0;
  }
  return acc;
}

}  // namespace

double wasserstein_distance(const QuantileCurve& a, const QuantileCurve& b) {
  const int na = a.grid_size();
  const int nb = b.grid_size();
  if (na == nb) {
    // Shared knots: h (2 sum e^2 - e_0^2 - e_K^2 + sum e_k e_{k+1}) / 3 with
    // e_0 = 0 and e_K = Ta - Tb.
    const int k = na + 2;
    std::vector<double> e(k);
    e[0] = 0.0;
    for (int j = 0; j < na; ++j) e[j + 1] = a.values()[j] - b.values()[j];
    e[k - 1] = a.window() - b.window();
    const double h = 1.0 / (na + 1);
    const double s2 = kern::dot(e.data(), e.data(), k);
    const double adj = kern::dot(e.data(), e.data() + 1, k - 1);
    const double acc = h * (2.0 * s2 - e[0] * e[0] - e[k - 1] * e[k - 1] + adj) / 3.0;
    return std::sqrt(std::max(acc, 0.0));
  }
  // Different resolutions: merge both knot sets and integrate per segment.
  std::vector<double> t;
  t.reserve(na + nb + 4);
  t.push_back(0.0);
  int i = 1, j = 1;
  while (i <= na || j <= nb) {
    const double ta = i <= na ? static_cast<double>(i) / (na + 1) : 2.0;
    const double tb = j <= nb ? static_cast<double>(j) / (nb + 1) : 2.0;
    if (ta < tb) {
      t.push_back(ta);
      ++i;
    } else if (tb < ta) {
      t.push_back(tb);
      ++j;
    } else {
      t.push_back(ta);
      ++i;
      ++j;
    }
  }
  t.push_back(1.0);
  std::vector<double> e(t.size());
  for (std::size_t k = 0; k < t.size(); ++k) e[k] = a(t[k]) - b(t[k]);
  return std::sqrt(std::max(sq_l2_from_knot_errors(e, t), 0.0));
}

double intensity_distance(const IntensitySpacePoint& a, const IntensitySpacePoint& b) {
  const double dt = a.tau - b.tau;
  const double dw = wasserstein_distance(a.shape, b.shape);
  return std::sqrt(dt * dt + dw * dw);
}

CdfCurve quantile_to_cdf(const QuantileCurve& q, int m) {
  if (m < 2) throw ConfigError("quantile_to_cdf: need at least 2 output points");
  const double T = q.window();
  CdfCurve f{T, std::vector<double>(m)};
  const double step = T / (m - 1);
  for (int k = 0; k < m; ++k) f.values[k] = q.inverse(k * step);
  f.values[0] = 0.0;
  f.values[m - 1] = 1.0;
  return f;
}

DensityCurve cdf_to_density(const CdfCurve& f, double bandwidth, int m_out,
                            kern::KernelFamily kernel) {
  const double T = f.window;
  const int m_in = static_cast<int>(f.values.size());
  if (!(T > 0.0)) throw ConfigError("cdf_to_density: window must be positive");
  if (m_in < 2) throw ConfigError("cdf_to_density: input grid too small");
  if (m_out < 2) throw ConfigError("cdf_to_density: need at least 2 output points");
  if (!(bandwidth > 0.0) || !(bandwidth < 0.5 * T))
    throw ConfigError("cdf_to_density: bandwidth must lie in (0, T/2)");
  const double din = T / (m_in - 1);
  if (bandwidth < din)
    throw NumericError("cdf_to_density: bandwidth below input grid resolution");

  std::vector<double> out(m_out);
  const double dout = T / (m_out - 1);
  for (int k = 0; k < m_out; ++k) {
    const double s = k * dout;
    int lo = static_cast<int>(std::ceil((s - bandwidth) / din));
    int hi = static_cast<int>(std::floor((s + bandwidth) / din));
    lo = std::max(lo, 0);
    hi = std::min(hi, m_in - 1);
    // Local-linear slope at s from the windowed grid points.
    double u0 = 0, u1 = 0, u2 = 0, v0 = 0, v1 = 0;
    for (int i = lo; i <= hi; ++i) {
      const double d = i * din - s;
      const double uu = d / bandwidth;
      double kv = 1.0 - uu * uu;
      switch (kernel) {
        case kern::KernelFamily::epanechnikov: kv = kv > 0 ? 0.75 * kv : 0.0; break;
        case kern::KernelFamily::triangular: {
          const double tv = 1.0 - std::fabs(uu);
          kv = tv > 0 ? tv : 0.0;
          break;
        }
        case kern::KernelFamily::quartic: kv = kv > 0 ? 0.9375 * kv * kv : 0.0; break;
      }
      u0 += kv;
      u1 += kv * d;
      u2 += kv * d * d;
      v0 += kv * f.values[i];
      v1 += kv * d * f.values[i];
    }
    const double det = u0 * u2 - u1 * u1;
    if (!(det > 1e-14 * std::max(u0 * u2, 1e-300)))
      throw NumericError("cdf_to_density: degenerate window at s=" + std::to_string(s));
    const double slope = (u0 * v1 - u1 * v0) / det;
    out[k] = slope > 0.0 ? slope : 0.0;
  }

  double total = 0.5 * (out.front() + out.back());
  for (int k = 1; k + 1 < m_out; ++k) total += out[k];
  total *= dout;
  if (!(total > 0.0))
    throw NumericError("cdf_to_density: flat CDF, no mass to recover");
  for (double& v : out) v /= total;
  return DensityCurve(T, std::move(out));
}

}  // namespace coxreg
