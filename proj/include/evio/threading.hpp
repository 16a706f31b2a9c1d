#pragma once

#include <cstddef>
#include <functional>

namespace evio {

/// Worker count for batch operations: the EVIO_THREADS environment variable
/// when set to a positive value, hardware concurrency otherwise (a value of
/// 0 also means auto).
std::size_t thread_budget();

/// Runs fn(0..n-1) across up to thread_budget() workers. Falls back to a
/// plain loop when the budget is 1 or n is small. Exceptions from workers
/// are rethrown on the calling thread.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace evio
