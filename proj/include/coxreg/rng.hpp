#pragma once

#include <cstdint>

// Counter-based random streams. Every consumer derives its own stream from a
// master seed plus integer tags, so replicates can be generated on any number
// of worker threads and still produce the same draws in the same order.

namespace coxreg::rng {

// splitmix64 finalizer; full-avalanche 64-bit mix.
std::uint64_t mix64(std::uint64_t z);

// Collapse a (seed, tag...) tuple into a stream key.
std::uint64_t derive_key(std::uint64_t seed, std::uint64_t tag);
std::uint64_t derive_key(std::uint64_t seed, std::uint64_t tag_a, std::uint64_t tag_b);

class Stream {
 public:
  explicit Stream(std::uint64_t key) : key_(key), state_(mix64(key)) {}

  // Independent stream for (this stream's key, tag); does not consume draws.
  Stream fork(std::uint64_t tag) const { return Stream(derive_key(key_, tag)); }

  std::uint64_t next_u64();

  // Uniform on the open interval (0, 1); safe to feed through inverse CDFs.
  double u01();

  // Standard normal via the inverse CDF, so each draw costs exactly one
  // uniform and parallel replays stay aligned.
  double normal();
  double normal(double mu, double sigma);

  // Normal(mu, sigma) conditioned on [lo, hi]; sigma == 0 collapses to the
  // clamped mean. Inverse-CDF construction, max error below 1e-12.
  double truncated_normal(double mu, double sigma, double lo, double hi);

  // Poisson draw by chunked sequential-search inversion: lambda is split into
  // pieces of at most 400 (counts add across independent pieces), and each
  // piece inverts one uniform through the pmf recurrence p_{k+1} = p_k l/(k+1).
  // Exact, no rejection loop, no underflow for any lambda in use here.
  std::int64_t poisson(double lambda);

  std::uint64_t key() const { return key_; }

 private:
  std::int64_t poisson_small(double lambda);

  std::uint64_t key_;
  std::uint64_t state_;
};

// Phi(x), double-accurate via erfc.
double normal_cdf(double x);

// Phi^{-1}(p) by Wichura's PPND16 rational approximations (relative error
// around 1e-15 over (0,1)).
double normal_quantile(double p);

}  // namespace coxreg::rng
