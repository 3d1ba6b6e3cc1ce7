#pragma once

#include <cstddef>
#include <functional>

namespace qce {

/// Worker count: QCE_THREADS if set (>= 1), otherwise the hardware concurrency.
int thread_count();
void set_thread_count(int n);

/// Reads QCE_THREADS and caps the BLAS thread pool accordingly.
void configure_threads_from_env();

/// Runs body(0) ... body(n - 1) on up to thread_count() workers. The first
/// exception thrown by any task is rethrown after all workers finish.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

} // namespace qce
