#include "ergo/model.hpp"

#include <algorithm>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace ergo {

void parallel_for(std::size_t n, const ExecPolicy& exec,
                  const std::function<void(std::size_t, std::size_t)>& chunk) {
  const int workers = std::max(1, exec.workers);
  if (workers == 1 || n < 2048) {
    chunk(0, n);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  std::exception_ptr first_error;
  std::mutex error_mutex;
  const std::size_t per = (n + workers - 1) / workers;
  for (int w = 0; w < workers; ++w) {
    const std::size_t lo = std::min(n, std::size_t(w) * per);
    const std::size_t hi = std::min(n, lo + per);
    if (lo >= hi) break;
    pool.emplace_back([&, lo, hi] {
      try {
        chunk(lo, hi);
      } catch (...) {
        std::lock_guard<std::mutex> guard(error_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace ergo
