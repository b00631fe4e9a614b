#include "hcn/parallel.hpp"

#include <algorithm>
#include <cstdlib>
#include <thread>
#include <vector>

namespace hcn {

int thread_count() {
  int n = 0;
  if (const char* env = std::getenv("HCN_THREADS")) n = std::atoi(env);
  if (n <= 0) n = static_cast<int>(std::thread::hardware_concurrency());
  return std::max(1, n);
}

void parallel_for(std::int64_t total, const std::function<void(std::int64_t)>& fn) {
  if (total <= 0) return;
  const int workers = static_cast<int>(std::min<std::int64_t>(thread_count(), total));
  if (workers == 1 || total < 64) {
    for (std::int64_t i = 0; i < total; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  const std::int64_t chunk = (total + workers - 1) / workers;
  for (int t = 0; t < workers; ++t) {
    const std::int64_t lo = t * chunk;
    const std::int64_t hi = std::min(total, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([lo, hi, &fn] {
      for (std::int64_t i = lo; i < hi; ++i) fn(i);
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace hcn
