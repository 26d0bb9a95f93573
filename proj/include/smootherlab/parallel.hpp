#pragma once

#include <cstddef>
#include <functional>

namespace smootherlab {

/// Worker count: the explicit limit if set, else SMOOTHERLAB_THREADS, else
/// the hardware concurrency.
int worker_count();

/// Process-wide override; values < 1 clear it.
void set_thread_limit(int threads);

/// Runs body(0) ... body(count-1) on the pool. Every index runs even if one
/// throws; the exception of the lowest failing index is rethrown.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace smootherlab
