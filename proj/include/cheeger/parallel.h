#pragma once

#include <cstddef>
#include <functional>

namespace cheeger {

/// Worker count: CHEEGER_THREADS when set (>= 1), otherwise the hardware
/// concurrency.
int thread_count();

/// Runs body(i) for i in [0, n). Work is spread over thread_count()
/// workers; calls made from inside a worker run serially. Results must be
/// written to per-index slots so the merge order stays deterministic.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace cheeger
