#pragma once

#include <cstddef>
#include <functional>

namespace conekit {

// Worker count: CONEKIT_THREADS if set to a positive integer, otherwise the
// hardware concurrency (at least 1).
int worker_count();

// Calls body(i) for i in [0, count) across worker_count() threads. Results
// must be written to per-index slots; the first exception thrown is rethrown
// after all workers finish.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace conekit
