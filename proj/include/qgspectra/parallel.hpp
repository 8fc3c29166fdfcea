#pragma once

#include <cstddef>
#include <functional>

namespace qgs {

/// Process-wide worker cap used by parallel_for. 0 means hardware concurrency.
void set_thread_count(unsigned n);
unsigned thread_count();

/// Calls body(i) for i in [0, n). Indices are split into contiguous chunks,
/// so results written by index are independent of the thread count. The first
/// exception thrown by any worker is rethrown after all workers finish.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

} // namespace qgs
