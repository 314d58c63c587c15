#pragma once

#include <cstddef>
#include <functional>

namespace cscope {

/// Worker count: CASCADE_SCOPE_THREADS if set to a positive integer, else the
/// hardware concurrency (at least 1).
int thread_count();

/// Runs body(i) for i in [0, n) on up to thread_count() threads using fixed
/// contiguous chunks. Callers write results by index, so the outcome does not
/// depend on scheduling. The first exception thrown by any worker is rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace cscope
