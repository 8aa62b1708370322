#include "srecop/parallel.hpp"

#include <algorithm>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace srecop {

void parallel_for(Index n, int workers, const std::function<void(Index)>& fn) {
  if (n <= 0) return;
  workers = std::min<int>(std::max(workers, 1), static_cast<int>(n));
  if (workers == 1) {
    for (Index i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  std::exception_ptr error;
  std::mutex error_mutex;
  for (int w = 0; w < workers; ++w) {
    const Index lo = n * w / workers;
    const Index hi = n * (w + 1) / workers;
    pool.emplace_back([&, lo, hi] {
      try {
        for (Index i = lo; i < hi; ++i) fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace srecop
