#pragma once

#include <cstddef>
#include <functional>

namespace boxcast {

// Worker count from BOXCAST_THREADS (default 1, clamped to [1, 64]).
int thread_count();

// Runs fn(i) for i in [0, n) on thread_count() workers. Each index is
// handled exactly once; callers write results into per-index slots so the
// outcome does not depend on scheduling. The first exception is rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace boxcast
