#pragma once

#include <cstddef>
#include <functional>

namespace lrsi {

// Number of workers to use for a request: <= 0 means all hardware threads.
int resolve_threads(int requested);

// Calls body(i) for i in [0, n) on up to `threads` workers. Each index is
// visited exactly once; callers write results by index, so the outcome does
// not depend on the worker count. The first exception thrown is rethrown.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& body);

}  // namespace lrsi
