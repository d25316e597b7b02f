#pragma once

#include <cstddef>
#include <functional>

namespace kinv {

/// Number of worker threads used by parallel_for. Defaults to the hardware
/// concurrency; KINV_THREADS in the environment overrides it.
std::size_t worker_count();

/// Calls body(i) for every i in [0, n), spread over worker_count() threads in
/// contiguous chunks. body must only write to per-index state; callers reduce
/// afterwards in index order so results never depend on scheduling. The first
/// exception thrown by any body is rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace kinv
