#pragma once

#include <cstdint>
#include <functional>

namespace hcn {

// Worker thread cap: HCN_THREADS env var; 0 or unset means hardware
// concurrency. Re-read on every call so tests can vary it.
int thread_count();

// Runs fn(i) for every i in [0, total), chunked contiguously across threads.
// fn must only write state owned by index i; results are then independent of
// the thread count.
void parallel_for(std::int64_t total, const std::function<void(std::int64_t)>& fn);

}  // namespace hcn
