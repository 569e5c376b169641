#pragma once

#include <cstddef>
#include <functional>

namespace lngca {

/// Worker count: LNGCA_THREADS if set to a positive integer, otherwise the
/// hardware concurrency (at least 1).
unsigned default_thread_count();

/// Runs body(i) for i in [0, count). Iterations must only write to
/// index-owned state. The first exception thrown by any iteration is
/// rethrown after all workers join.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body,
                  unsigned threads = 0);

}  // namespace lngca
