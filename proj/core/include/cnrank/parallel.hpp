#pragma once

#include <cstddef>
#include <functional>

namespace cnrank {

/// Number of workers used by parallel_for. Reads CNRANK_THREADS once;
/// unset or values < 1 fall back to the hardware thread count.
std::size_t worker_count();

/// Runs fn(i) for i in [0, n) across worker_count() threads with static
/// chunking. Each index must write only its own outputs, so results are
/// identical for any worker count. The first exception thrown by a worker
/// is rethrown on the calling thread.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace cnrank
