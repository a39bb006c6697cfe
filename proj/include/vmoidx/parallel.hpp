#pragma once

#include <cstddef>
#include <functional>

namespace vmoidx {

// Worker count: VMOIDX_THREADS if set and positive, else hardware concurrency.
int thread_count();

// Runs body(i) for i in [0, n). Exceptions from workers are rethrown on the caller.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace vmoidx
