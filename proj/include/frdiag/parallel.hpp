#pragma once

#include <cstddef>
#include <functional>

namespace frdiag {

/// Worker count: hardware concurrency capped by the FRDIAG_THREADS
/// environment variable (when set to a positive integer).
unsigned worker_count();

/// Runs body(i) for i in [0, n). Each index is processed exactly once and
/// writes only its own output slot, so results do not depend on scheduling.
/// The first exception thrown by any body is rethrown after all workers join.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace frdiag
