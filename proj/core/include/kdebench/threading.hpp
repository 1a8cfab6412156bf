#pragma once

#include <cstdint>
#include <functional>

namespace kdebench {

// Worker count resolution: explicit argument > KDEBENCH_THREADS env var >
// hardware concurrency.
int default_thread_count();

// Runs fn(begin, end) over contiguous chunks of [0, n) on up to `threads`
// worker threads. Falls through to a direct call when threads <= 1 or the
// range is tiny. The first exception thrown by a worker is rethrown.
void parallel_for(std::int64_t n, int threads,
                  const std::function<void(std::int64_t, std::int64_t)>& fn);

}  // namespace kdebench
