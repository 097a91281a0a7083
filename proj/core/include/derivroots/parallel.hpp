#pragma once

#include <cstddef>
#include <functional>

namespace derivroots {

// Thread count from DERIVROOTS_THREADS, else hardware concurrency (>= 1).
unsigned default_thread_count();

// Runs body(i) for i in [0, count) on up to `threads` workers. Work is
// claimed dynamically; callers write into per-index slots, so output order
// never depends on scheduling. If tasks throw, the exception from the
// lowest failing index is rethrown after all workers join.
void parallel_for(std::size_t count, unsigned threads,
                  const std::function<void(std::size_t)>& body);

}  // namespace derivroots
