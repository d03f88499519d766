#pragma once

#include <cstddef>
#include <functional>

namespace ecglab {

/// Worker count from ECG_LAB_WORKERS, else the hardware concurrency (at least 1).
/// Throws std::invalid_argument on a malformed value.
std::size_t worker_count();

/// Calls fn(i) for i in [0, n) on up to `workers` threads. Each index is
/// handled exactly once; the exception from the lowest failing index is
/// rethrown after all workers finish.
void parallel_for(std::size_t n, std::size_t workers, const std::function<void(std::size_t)>& fn);

}  // namespace ecglab
