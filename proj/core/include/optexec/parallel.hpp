#pragma once

#include <cstddef>
#include <functional>

namespace optexec {

/// Number of worker threads to use: `requested` if positive, otherwise the
/// OPTEXEC_THREADS environment variable, otherwise hardware concurrency.
int worker_count(int requested = 0);

/// Runs fn(i) for i in [0, n). Work items are pulled from a shared atomic
/// counter, so scheduling is load balanced; callers must write results into
/// per-index slots to stay deterministic under any thread count.
/// Exceptions thrown by fn are captured and rethrown on the calling thread.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn,
                  int workers = 0);

}  // namespace optexec
