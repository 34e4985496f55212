#pragma once

#include <functional>

namespace mispar {

/// Worker count: `requested` if positive, else hardware concurrency; always capped
/// by the MISPAR_THREADS environment variable when it holds a positive integer.
int worker_count(int requested = 0);

/// Calls fn(i) for i in [0, count) on up to `workers` threads. Each index runs
/// exactly once; the first exception thrown by fn is rethrown after all workers join.
void parallel_for(int count, const std::function<void(int)>& fn, int workers);

}  // namespace mispar
