#pragma once

#include <cstddef>
#include <functional>

namespace spurs {

// Worker count: SPURS_THREADS if set (>= 1), else hardware concurrency.
unsigned thread_count();

// Runs body(begin, end) over contiguous chunks of [0, n). Chunks are
// disjoint, so bodies that write only their own index range give results
// independent of the thread count.
void parallel_for(std::size_t n,
                  const std::function<void(std::size_t, std::size_t)>& body,
                  std::size_t min_chunk = 1);

}  // namespace spurs
