#pragma once

#include <cstdint>
#include <functional>

namespace trilin::parallel {

// Upper bound on worker threads. 0 restores the hardware default.
// Also settable through the TRILIN_THREADS environment variable (read by the
// CLI, not by the library).
void set_thread_cap(unsigned cap);
unsigned thread_cap();

// Runs f(i) for i in [0, n). Work is split into contiguous chunks, one per
// thread; each index is processed exactly once, so writes to disjoint slots
// give identical results for any thread count. The first exception thrown by
// any worker is rethrown on the calling thread.
void parallel_for(std::int64_t n, const std::function<void(std::int64_t)>& f);

}  // namespace trilin::parallel
