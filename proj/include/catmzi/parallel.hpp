#pragma once

#include <cstddef>
#include <functional>

namespace catmzi {

// Workers for `jobs` independent tasks: hardware concurrency, capped
// by the CATMZI_WORKERS environment variable and by the job count.
int worker_count(std::size_t jobs);

// Runs body(i) for i in [0, n) on worker_count(n) threads.  The first
// exception is rethrown on the calling thread after all workers join.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

} // namespace catmzi
