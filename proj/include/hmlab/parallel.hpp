#pragma once

#include <cstddef>
#include <functional>

namespace hmlab {

// Worker count from HMLAB_WORKERS, defaulting to the hardware concurrency.
int worker_count();
// Overrides the environment; 0 restores it.
void set_worker_count(int workers);

// Runs body(i) for i in [0, n) across workers. Each index is handled exactly
// once; callers write results by index so output never depends on scheduling.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

// Runs body(begin, end) over fixed-size chunks of [0, n). Chunk boundaries do
// not depend on the worker count, so per-chunk reductions are deterministic.
// Nested calls from inside a worker run serially.
void parallel_chunks(std::size_t n, std::size_t chunk, const std::function<void(std::size_t, std::size_t)>& body);

}  // namespace hmlab
