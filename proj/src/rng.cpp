#include "coxreg/rng.hpp"

#include <cmath>
#include <limits>

#include "coxreg/errors.hpp"

namespace coxreg::rng {

namespace {
constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;
}

std::uint64_t mix64(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xbf58476d1ce4e5b9ULL;
  z ^= z >> 27;
  z *= 0x94d049bb133111ebULL;
  z ^= z >> 31;
  return z;
}

std::uint64_t derive_key(std::uint64_t seed, std::uint64_t tag) {
  return mix64(seed + kGolden * (tag + 1));
}

std::uint64_t derive_key(std::uint64_t seed, std::uint64_t tag_a, std::uint64_t tag_b) {
  return derive_key(derive_key(seed, tag_a), tag_b);
}

std::uint64_t Stream::next_u64() {
  state_ += kGolden;
  return mix64(state_);
}

double Stream::u01() {
  // 52-bit mantissa shifted into (0,1): never returns 0 or 1 exactly.
  return (static_cast<double>(next_u64() >> 12) + 0.5) * 0x1.0p-52;
}

double Stream::normal() { return normal_quantile(u01()); }

double Stream::normal(double mu, double sigma) { return mu + sigma * normal(); }

double Stream::truncated_normal(double mu, double sigma, double lo, double hi) {
  if (!(lo < hi)) throw ConfigError("truncated_normal: empty interval");
  if (sigma == 0.0) {
    double v = mu;
    if (v < lo) v = lo;
    if (v > hi) v = hi;
    return v;
  }
  const double pa = normal_cdf((lo - mu) / sigma);
  const double pb = normal_cdf((hi - mu) / sigma);
  const double p = pa + u01() * (pb - pa);
  double v = mu + sigma * normal_quantile(p);
  // Guard the interval against the last-ulp of the quantile evaluation.
  if (v < lo) v = lo;
  if (v > hi) v = hi;
  return v;
}

std::int64_t Stream::poisson_small(double lambda) {
  if (lambda <= 0.0) return 0;
  const double u = u01();
  double p = std::exp(-lambda);
  double c = p;
  std::int64_t k = 0;
  // Far tail guard: P(X > lambda + 12 sqrt(lambda) + 30) is below 1e-30.
  const std::int64_t cap =
      static_cast<std::int64_t>(lambda + 12.0 * std::sqrt(lambda) + 30.0);
  while (u > c && k < cap) {
    ++k;
    p *= lambda / static_cast<double>(k);
    c += p;
  }
  return k;
}

std::int64_t Stream::poisson(double lambda) {
  if (!(lambda >= 0.0) || !std::isfinite(lambda))
    throw ConfigError("poisson: lambda must be finite and nonnegative");
  std::int64_t total = 0;
  while (lambda > 400.0) {
    total += poisson_small(400.0);
    lambda -= 400.0;
  }
  return total + poisson_small(lambda);
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x * M_SQRT1_2); }

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    if (p == 0.0) return -std::numeric_limits<double>::infinity();
    if (p == 1.0) return std::numeric_limits<double>::infinity();
    throw ConfigError("normal_quantile: p outside [0,1]");
  }
  // PPND16 (Wichura, algorithm AS 241): three rational approximations split
  // by |p - 1/2|.
  const double q = p - 0.5;
  if (std::fabs(q) <= 0.425) {
    const double r = 0.180625 - q * q;
    return q *
           (((((((2.5090809287301226727e3 * r + 3.3430575583588128105e4) * r +
                 6.7265770927008700853e4) * r + 4.5921953931549871457e4) * r +
               1.3731693765509461125e4) * r + 1.9715909503065514427e3) * r +
             1.3314166789178437745e2) * r + 3.3871328727963666080e0) /
           (((((((5.2264952788528545610e3 * r + 2.8729085735721942674e4) * r +
                 3.9307895800092710610e4) * r + 2.1213794301586595867e4) * r +
               5.3941960214247511077e3) * r + 6.8718700749205790830e2) * r +
             4.2313330701600911252e1) * r + 1.0);
  }
  double r = q < 0.0 ? p : 1.0 - p;
  r = std::sqrt(-std::log(r));
  double val;
  if (r <= 5.0) {
    r -= 1.6;
    val = (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
                2.41780725177450611770e-1) * r + 1.27045825245236838258e0) * r +
              3.64784832476320460504e0) * r + 5.76949722146069140550e0) * r +
            4.63033784615654529590e0) * r + 1.42343711074968357734e0) /
          (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
                1.51986665636164571966e-2) * r + 1.48103976427480074590e-1) * r +
              6.89767334985100004550e-1) * r + 1.67638483018380384940e0) * r +
            2.05319162663775882187e0) * r + 1.0);
  } else {
    r -= 5.0;
    val = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
                1.24266094738807843860e-3) * r + 2.65321895265761230930e-2) * r +
              2.96560571828504891230e-1) * r + 1.78482653991729133580e0) * r +
            5.46378491116411436990e0) * r + 6.65790464350110377720e0) /
          (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
                1.84631831751005468180e-5) * r + 7.86869131145613259100e-4) * r +
              1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r +
            5.99832206555887937690e-1) * r + 1.0);
  }
  return q < 0.0 ? -val : val;
}

}  // namespace coxreg::rng
