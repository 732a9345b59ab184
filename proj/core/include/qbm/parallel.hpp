// parallel.hpp: index-parallel loop over a fixed worker count

#pragma once

#include <cstddef>
#include <functional>

namespace qbm {

// Calls body(i) for i in [0, count) on up to `threads` workers. Each index is
// visited exactly once; the first exception thrown is rethrown on the caller.
// threads <= 0 means default_thread_count().
void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& body);

// QBM_THREADS if set and positive, otherwise 1.
int default_thread_count();

} // namespace qbm
