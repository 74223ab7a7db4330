#pragma once

#include <cstddef>
#include <functional>

namespace fracprop {

// Worker count for data-parallel loops. Reads FRACPROP_THREADS on every call;
// unset or unparsable means std::thread::hardware_concurrency().
unsigned thread_count();

// Calls body(i) for every i in [0, n). Iterations are split into contiguous
// blocks, one per worker; callers write results to slot i so the outcome does
// not depend on scheduling. The first exception thrown (lowest block index)
// is rethrown after all workers join.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace fracprop
