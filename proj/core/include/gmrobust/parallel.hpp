#pragma once

#include <cstddef>
#include <functional>

namespace gmrobust {

/// Worker count from an explicit request, falling back to the
/// GMROBUST_THREADS environment variable, then to 1.
unsigned resolve_threads(unsigned requested);

/// Runs task(i) for i in [0, count) on up to `threads` workers. Tasks must
/// write only to their own output slots. The first exception thrown by any
/// task is rethrown after all workers join.
void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& task);

} // namespace gmrobust
