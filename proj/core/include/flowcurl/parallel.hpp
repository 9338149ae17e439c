#pragma once

#include <cstddef>
#include <functional>

namespace flowcurl {

/// Worker cap: FLOWCURL_THREADS when set to a positive integer, else the hardware concurrency.
std::size_t worker_count();

/// Runs task(i) for every i in [0, n). Tasks must write disjoint outputs; the first
/// exception thrown by any task is rethrown after all workers finish.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& task);

}  // namespace flowcurl
