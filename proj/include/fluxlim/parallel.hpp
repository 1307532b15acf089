#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace fluxlim {

/// Parallel-map capability handed to the numerical kernels. Work is split into
/// contiguous static blocks, so results written by index are independent of
/// the worker count; reductions are done by the caller in index order.
class Parallel {
 public:
  explicit Parallel(int workers = 1) : workers_(std::max(1, workers)) {}

  static Parallel from_env(const char* name = "FLUXLIM_WORKERS") {
    if (const char* v = std::getenv(name)) {
      try {
        return Parallel(std::stoi(v));
      } catch (...) {
      }
    }
    return Parallel(1);
  }

  int workers() const { return workers_; }

  template <typename F>
  void for_each(std::size_t n, F&& fn) const {
    const std::size_t w = std::min<std::size_t>(static_cast<std::size_t>(workers_), n);
    if (w <= 1) {
      for (std::size_t i = 0; i < n; ++i) fn(i);
      return;
    }
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    pool.reserve(w);
    for (std::size_t k = 0; k < w; ++k) {
      const std::size_t lo = n * k / w, hi = n * (k + 1) / w;
      pool.emplace_back([&, lo, hi] {
        try {
          for (std::size_t i = lo; i < hi; ++i) fn(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      });
    }
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
  }

 private:
  int workers_;
};

}  // namespace fluxlim
