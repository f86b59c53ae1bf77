#pragma once

#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace coxreg {

// Runs fn(0), ..., fn(jobs-1) on up to max_threads workers (0: hardware
// concurrency). Job order across workers is unspecified, so fn must write
// only to its own slot. The first exception is rethrown on the caller.
template <class Fn>
void parallel_for(std::size_t jobs, int max_threads, Fn&& fn) {
  int nt = max_threads > 0 ? max_threads
                           : static_cast<int>(std::thread::hardware_concurrency());
  if (nt < 1) nt = 1;
  nt = static_cast<int>(std::min<std::size_t>(nt, jobs));
  if (nt <= 1) {
    for (std::size_t j = 0; j < jobs; ++j) fn(j);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mu;
  auto worker = [&] {
    while (true) {
      const std::size_t j = next.fetch_add(1);
      if (j >= jobs) return;
      try {
        fn(j);
      } catch (...) {
        std::lock_guard<std::mutex> lk(error_mu);
        if (!first_error) first_error = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(nt);
  for (int t = 0; t < nt; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace coxreg
